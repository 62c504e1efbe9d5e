/*
 * Copyright 2026 The oodkit authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oodkit/layers.hpp"

namespace oodkit {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::tconv2d: return "tconv2d";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::dropout: return "dropout";
    case LayerKind::leaky_relu: return "leaky_relu";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::softmax: return "softmax";
    case LayerKind::flatten: return "flatten";
  }
  return "?";
}

LayerKind layer_kind_from_name(const std::string& name) {
  for (LayerKind k : {LayerKind::dense, LayerKind::conv2d, LayerKind::tconv2d,
                      LayerKind::batchnorm, LayerKind::dropout, LayerKind::leaky_relu,
                      LayerKind::sigmoid, LayerKind::softmax, LayerKind::flatten}) {
    if (name == layer_kind_name(k)) return k;
  }
  throw InvalidSpecError("unknown layer kind '" + name + "'");
}

LayerSpec LayerSpec::make_dense(int units, int in_features) {
  LayerSpec s;
  s.kind = LayerKind::dense;
  s.units = units;
  s.in_features = in_features;
  return s;
}

LayerSpec LayerSpec::make_conv2d(int in_c, int out_c, int kernel, int stride, int pad) {
  LayerSpec s;
  s.kind = LayerKind::conv2d;
  s.in_channels = in_c;
  s.out_channels = out_c;
  s.kernel = kernel;
  s.stride = stride;
  s.pad = pad;
  return s;
}

LayerSpec LayerSpec::make_tconv2d(int in_c, int out_c, int kernel, int stride, int pad,
                                  int output_pad, int in_h, int in_w) {
  LayerSpec s;
  s.kind = LayerKind::tconv2d;
  s.in_channels = in_c;
  s.out_channels = out_c;
  s.kernel = kernel;
  s.stride = stride;
  s.pad = pad;
  s.output_pad = output_pad;
  s.in_height = in_h;
  s.in_width = in_w;
  return s;
}

LayerSpec LayerSpec::make_batchnorm(int features) {
  LayerSpec s;
  s.kind = LayerKind::batchnorm;
  s.features = features;
  return s;
}

LayerSpec LayerSpec::make_dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::make_leaky_relu(double alpha) {
  LayerSpec s;
  s.kind = LayerKind::leaky_relu;
  s.alpha = alpha;
  return s;
}

LayerSpec LayerSpec::make_sigmoid() {
  LayerSpec s;
  s.kind = LayerKind::sigmoid;
  return s;
}

LayerSpec LayerSpec::make_softmax() {
  LayerSpec s;
  s.kind = LayerKind::softmax;
  return s;
}

LayerSpec LayerSpec::make_flatten() {
  LayerSpec s;
  s.kind = LayerKind::flatten;
  return s;
}

void validate_layer_spec(const LayerSpec& spec) {
  const std::string kind = layer_kind_name(spec.kind);
  switch (spec.kind) {
    case LayerKind::dense:
      if (spec.units <= 0) throw InvalidSpecError("dense: units must be positive");
      if (spec.in_features < 0) {
        throw InvalidSpecError("dense: in_features must be non-negative");
      }
      break;
    case LayerKind::conv2d:
    case LayerKind::tconv2d:
      if (spec.out_channels <= 0 || spec.in_channels < 0) {
        throw InvalidSpecError(kind + ": channel counts must be positive");
      }
      if (spec.kernel <= 0 || spec.stride <= 0) {
        throw InvalidSpecError(kind + ": kernel and stride must be positive");
      }
      if (spec.pad < 0) throw InvalidSpecError(kind + ": pad must be non-negative");
      if (spec.kind == LayerKind::tconv2d &&
          (spec.output_pad < 0 || spec.output_pad >= spec.stride)) {
        throw InvalidSpecError("tconv2d: output_pad must be in [0, stride)");
      }
      break;
    case LayerKind::batchnorm:
      if (spec.features < 0) throw InvalidSpecError("batchnorm: features must be positive");
      break;
    case LayerKind::dropout:
      if (!(spec.rate >= 0.0 && spec.rate < 1.0)) {
        throw InvalidSpecError("dropout: rate must be in [0, 1)");
      }
      break;
    case LayerKind::leaky_relu:
      if (!(spec.alpha > 0.0)) throw InvalidSpecError("leaky_relu: alpha must be positive");
      break;
    case LayerKind::sigmoid:
    case LayerKind::softmax:
    case LayerKind::flatten:
      break;
  }
}

bool layer_has_weights(LayerKind kind) {
  return kind == LayerKind::dense || kind == LayerKind::conv2d ||
         kind == LayerKind::tconv2d;
}

namespace {

std::int64_t flat_size(const Shape& s) { return shape_numel(s); }

int conv_out_extent(int in, int kernel, int stride, int pad) {
  const int span = in + 2 * pad - kernel;
  if (span < 0) {
    throw InvalidSpecError("conv2d: kernel exceeds padded input (" + std::to_string(in) +
                           " + 2*" + std::to_string(pad) + " < " + std::to_string(kernel) +
                           ")");
  }
  return span / stride + 1;
}

}  // namespace

Shape layer_output_shape(const LayerSpec& spec, const Shape& in_shape,
                         LayerSpec* resolved) {
  validate_layer_spec(spec);
  LayerSpec r = spec;
  Shape out;
  switch (spec.kind) {
    case LayerKind::dense: {
      if (in_shape.size() != 1) {
        throw InvalidSpecError("dense expects a flat input, got " + shape_str(in_shape) +
                               " (insert a flatten layer)");
      }
      if (spec.in_features != 0 && spec.in_features != in_shape[0]) {
        throw InvalidSpecError("dense: declared in_features " +
                               std::to_string(spec.in_features) + " but input has " +
                               std::to_string(in_shape[0]));
      }
      r.in_features = in_shape[0];
      out = {spec.units};
      break;
    }
    case LayerKind::conv2d: {
      if (in_shape.size() != 3) {
        throw InvalidSpecError("conv2d expects (h, w, c) input, got " + shape_str(in_shape));
      }
      if (spec.in_channels != 0 && spec.in_channels != in_shape[2]) {
        throw InvalidSpecError("conv2d: declared in_channels " +
                               std::to_string(spec.in_channels) + " but input has " +
                               std::to_string(in_shape[2]));
      }
      r.in_channels = in_shape[2];
      out = {conv_out_extent(in_shape[0], spec.kernel, spec.stride, spec.pad),
             conv_out_extent(in_shape[1], spec.kernel, spec.stride, spec.pad),
             spec.out_channels};
      break;
    }
    case LayerKind::tconv2d: {
      int h = 0, w = 0, c = 0;
      if (in_shape.size() == 3) {
        h = in_shape[0];
        w = in_shape[1];
        c = in_shape[2];
        if ((spec.in_height != 0 && spec.in_height != h) ||
            (spec.in_width != 0 && spec.in_width != w)) {
          throw InvalidSpecError("tconv2d: declared input view does not match " +
                                 shape_str(in_shape));
        }
      } else if (in_shape.size() == 1 && spec.in_height > 0 && spec.in_width > 0 &&
                 spec.in_channels > 0) {
        h = spec.in_height;
        w = spec.in_width;
        c = spec.in_channels;
        if (static_cast<std::int64_t>(h) * w * c != flat_size(in_shape)) {
          throw InvalidSpecError("tconv2d: declared view " + std::to_string(h) + "x" +
                                 std::to_string(w) + "x" + std::to_string(c) +
                                 " does not match flat input " + shape_str(in_shape));
        }
      } else {
        throw InvalidSpecError(
            "tconv2d expects (h, w, c) input or a flat input with a declared view");
      }
      if (spec.in_channels != 0 && spec.in_channels != c) {
        throw InvalidSpecError("tconv2d: declared in_channels " +
                               std::to_string(spec.in_channels) + " but input has " +
                               std::to_string(c));
      }
      r.in_height = h;
      r.in_width = w;
      r.in_channels = c;
      const int oh = (h - 1) * spec.stride - 2 * spec.pad + spec.kernel + spec.output_pad;
      const int ow = (w - 1) * spec.stride - 2 * spec.pad + spec.kernel + spec.output_pad;
      if (oh <= 0 || ow <= 0) {
        throw InvalidSpecError("tconv2d: non-positive output extent");
      }
      out = {oh, ow, spec.out_channels};
      break;
    }
    case LayerKind::batchnorm: {
      const int feats = in_shape.back();
      if (spec.features != 0 && spec.features != feats) {
        throw InvalidSpecError("batchnorm: declared features " +
                               std::to_string(spec.features) + " but input has " +
                               std::to_string(feats));
      }
      r.features = feats;
      out = in_shape;
      break;
    }
    case LayerKind::dropout:
    case LayerKind::leaky_relu:
    case LayerKind::sigmoid:
      out = in_shape;
      break;
    case LayerKind::softmax:
      out = in_shape;  // normalized over the last axis
      break;
    case LayerKind::flatten:
      out = {static_cast<int>(flat_size(in_shape))};
      break;
  }
  if (resolved) *resolved = r;
  return out;
}

std::int64_t layer_param_count(const LayerSpec& spec, const Shape& in_shape) {
  LayerSpec r;
  layer_output_shape(spec, in_shape, &r);
  switch (spec.kind) {
    case LayerKind::dense:
      return static_cast<std::int64_t>(r.units) * flat_size(in_shape) + r.units;
    case LayerKind::conv2d:
    case LayerKind::tconv2d:
      return static_cast<std::int64_t>(r.kernel) * r.kernel * r.in_channels *
                 r.out_channels +
             r.out_channels;
    case LayerKind::batchnorm:
      return 2LL * r.features;
    default:
      return 0;
  }
}

}  // namespace oodkit
