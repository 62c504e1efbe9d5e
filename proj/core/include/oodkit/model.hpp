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

#ifndef OODKIT_MODEL_HPP_
#define OODKIT_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "oodkit/errors.hpp"
#include "oodkit/layers.hpp"
#include "oodkit/parallel.hpp"
#include "oodkit/rng.hpp"
#include "oodkit/tensor.hpp"

namespace oodkit {

enum class Role { cls, gen, dis };

const char* role_name(Role role);
Role role_from_name(const std::string& name);

// Layer sequence plus the role tag that fixes the output contract:
// cls ends in softmax of width n_classes, dis in sigmoid of width 1,
// gen in sigmoid matching the data shape.
struct ModelSpec {
  Role role = Role::cls;
  Shape input_shape;  // per-sample, excluding the batch axis
  std::vector<LayerSpec> layers;
  int n_classes = 0;  // cls only
};

// Shape-resolved layer: all inferred fields filled in at build time.
struct LayerPlan {
  LayerSpec spec;
  Shape in_shape;   // per-sample
  Shape out_shape;  // per-sample
};

enum class Mode { train, infer, mc_dropout };

namespace detail {
constexpr double kBatchnormEps = 1e-5;
constexpr double kBatchnormMomentum = 0.9;
}  // namespace detail

template <typename T>
struct ModelT {
  ModelSpec spec;
  std::vector<LayerPlan> plans;
  // Learnable tensors per layer: {W, b} for dense/conv/tconv,
  // {gamma, beta} for batchnorm, empty otherwise.
  std::vector<std::vector<TensorT<T>>> params;
  // Non-learnable state per layer: {running_mean, running_var} for batchnorm.
  std::vector<std::vector<TensorT<T>>> buffers;

  int n_layers() const { return static_cast<int>(plans.size()); }
  const Shape& output_shape() const { return plans.back().out_shape; }

  std::int64_t param_count() const {
    std::int64_t n = 0;
    for (const auto& layer : params)
      for (const auto& t : layer) n += t.numel();
    return n;
  }

  bool has_dropout() const {
    for (const auto& p : plans)
      if (p.spec.kind == LayerKind::dropout) return true;
    return false;
  }

  // Visits every learnable tensor in a fixed order with a stable name,
  // "layer3.w" style. Used by the optimizer and the checkpoint writer.
  template <typename Fn>
  void for_each_param(Fn&& fn) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const LayerKind kind = plans[i].spec.kind;
      const char* names_wb[] = {"w", "b"};
      const char* names_bn[] = {"gamma", "beta"};
      const char** names = (kind == LayerKind::batchnorm) ? names_bn : names_wb;
      for (std::size_t j = 0; j < params[i].size(); ++j) {
        fn("layer" + std::to_string(i) + "." + names[j], params[i][j]);
      }
    }
  }

  template <typename Fn>
  void for_each_param(Fn&& fn) const {
    const_cast<ModelT*>(this)->for_each_param(
        [&fn](const std::string& name, TensorT<T>& t) {
          fn(name, static_cast<const TensorT<T>&>(t));
        });
  }

  template <typename Fn>
  void for_each_buffer(Fn&& fn) {
    for (std::size_t i = 0; i < buffers.size(); ++i) {
      const char* names[] = {"running_mean", "running_var"};
      for (std::size_t j = 0; j < buffers[i].size(); ++j) {
        fn("layer" + std::to_string(i) + "." + names[j], buffers[i][j]);
      }
    }
  }

  template <typename Fn>
  void for_each_buffer(Fn&& fn) const {
    const_cast<ModelT*>(this)->for_each_buffer(
        [&fn](const std::string& name, TensorT<T>& t) {
          fn(name, static_cast<const TensorT<T>&>(t));
        });
  }
};

using Model = ModelT<float>;

// Per-layer values backward needs beyond the activations themselves.
template <typename T>
struct LayerCacheT {
  TensorT<T> mask;               // dropout: multiplier (0 or 1/(1-rate))
  std::vector<T> mean, inv_std;  // batchnorm: train-mode batch statistics
};

// Everything forward computed, in order. acts[0] is the input batch and
// acts[i+1] the output of layer i; backward consumes the trace and does not
// touch the model parameters.
template <typename T>
struct ForwardTraceT {
  Mode mode = Mode::infer;
  std::vector<TensorT<T>> acts;
  std::vector<LayerCacheT<T>> caches;

  const TensorT<T>& output() const { return acts.back(); }
};

using ForwardTrace = ForwardTraceT<float>;

// Gradients of a scalar loss: one tensor per learnable parameter, in model
// order, plus the gradient with respect to the input batch.
template <typename T>
struct GradsT {
  std::vector<std::vector<TensorT<T>>> params;
  TensorT<T> input;
};

using Grads = GradsT<float>;

// ---------------------------------------------------------------------------
// Initialization

// Xavier/Glorot uniform weights for a layer with learnable weights:
// U(-a, a) with a = sqrt(6 / (fan_in + fan_out)). The layer geometry must be
// fully declared (dense: in_features, conv/tconv: in_channels). Biases are
// not part of the returned tensor; build_model() zero-fills them.
template <typename T>
TensorT<T> xavier_init(const LayerSpec& spec, Rng& rng) {
  validate_layer_spec(spec);
  Shape shape;
  std::int64_t fan_in = 0, fan_out = 0;
  switch (spec.kind) {
    case LayerKind::dense:
      if (spec.in_features <= 0) {
        throw InvalidSpecError("xavier_init: dense layer needs declared in_features");
      }
      shape = {spec.units, spec.in_features};
      fan_in = spec.in_features;
      fan_out = spec.units;
      break;
    case LayerKind::conv2d:
    case LayerKind::tconv2d:
      if (spec.in_channels <= 0) {
        throw InvalidSpecError("xavier_init: conv layer needs declared in_channels");
      }
      shape = {spec.kernel, spec.kernel, spec.in_channels, spec.out_channels};
      fan_in = static_cast<std::int64_t>(spec.kernel) * spec.kernel * spec.in_channels;
      fan_out = static_cast<std::int64_t>(spec.kernel) * spec.kernel * spec.out_channels;
      break;
    default:
      throw InvalidSpecError(std::string("xavier_init: layer kind '") +
                             layer_kind_name(spec.kind) + "' has no learnable weights");
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  TensorT<T> w(shape);
  for (auto& v : w.data) v = static_cast<T>(rng.uniform(-bound, bound));
  return w;
}

// ---------------------------------------------------------------------------
// Compute kernels. All loops assign each output element to exactly one
// worker and keep every reduction in a fixed order, so results do not
// depend on the thread count.

namespace detail {

template <typename T>
void dense_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                   TensorT<T>& y) {
  const int batch = x.dim(0), in = x.dim(1), out = w.dim(0);
  parallel_for(batch, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t bi = lo; bi < hi; ++bi) {
      const T* xr = &x.data[static_cast<std::size_t>(bi) * in];
      T* yr = &y.data[static_cast<std::size_t>(bi) * out];
      for (int o = 0; o < out; ++o) {
        const T* wr = &w.data[static_cast<std::size_t>(o) * in];
        T acc = b.data[static_cast<std::size_t>(o)];
        for (int i = 0; i < in; ++i) acc += xr[i] * wr[i];
        yr[o] = acc;
      }
    }
  });
}

template <typename T>
void dense_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& g,
                    TensorT<T>& dw, TensorT<T>& db, TensorT<T>& dx) {
  const int batch = x.dim(0), in = x.dim(1), out = w.dim(0);
  // Weight and bias gradients sum over the batch; accumulate in double.
  parallel_for(out, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t o = lo; o < hi; ++o) {
      T* dwr = &dw.data[static_cast<std::size_t>(o) * in];
      std::vector<double> acc(static_cast<std::size_t>(in), 0.0);
      double bias_acc = 0.0;
      for (int bi = 0; bi < batch; ++bi) {
        const double gv = g.data[static_cast<std::size_t>(bi) * out + o];
        bias_acc += gv;
        const T* xr = &x.data[static_cast<std::size_t>(bi) * in];
        for (int i = 0; i < in; ++i) acc[static_cast<std::size_t>(i)] += gv * xr[i];
      }
      for (int i = 0; i < in; ++i) dwr[i] = static_cast<T>(acc[static_cast<std::size_t>(i)]);
      db.data[static_cast<std::size_t>(o)] = static_cast<T>(bias_acc);
    }
  });
  parallel_for(batch, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t bi = lo; bi < hi; ++bi) {
      const T* gr = &g.data[static_cast<std::size_t>(bi) * out];
      T* dxr = &dx.data[static_cast<std::size_t>(bi) * in];
      for (int i = 0; i < in; ++i) dxr[i] = T(0);
      for (int o = 0; o < out; ++o) {
        const T gv = gr[o];
        if (gv == T(0)) continue;
        const T* wr = &w.data[static_cast<std::size_t>(o) * in];
        for (int i = 0; i < in; ++i) dxr[i] += gv * wr[i];
      }
    }
  });
}

struct ConvGeom {
  int batch, in_h, in_w, in_c, out_h, out_w, out_c, kernel, stride, pad;
};

template <typename T>
void conv2d_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                    const ConvGeom& geo, TensorT<T>& y) {
  const auto [batch, in_h, in_w, in_c, out_h, out_w, out_c, kernel, stride, pad] = geo;
  parallel_for(static_cast<std::int64_t>(batch) * out_h, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<T> acc(static_cast<std::size_t>(out_c));
    for (std::int64_t row = lo; row < hi; ++row) {
      const int bi = static_cast<int>(row / out_h);
      const int oh = static_cast<int>(row % out_h);
      for (int ow = 0; ow < out_w; ++ow) {
        for (int oc = 0; oc < out_c; ++oc) acc[static_cast<std::size_t>(oc)] = b.data[static_cast<std::size_t>(oc)];
        for (int kh = 0; kh < kernel; ++kh) {
          const int ih = oh * stride - pad + kh;
          if (ih < 0 || ih >= in_h) continue;
          for (int kw = 0; kw < kernel; ++kw) {
            const int iw = ow * stride - pad + kw;
            if (iw < 0 || iw >= in_w) continue;
            const T* xr = &x.data[((static_cast<std::size_t>(bi) * in_h + ih) * in_w + iw) * in_c];
            const T* wr = &w.data[(static_cast<std::size_t>(kh) * kernel + kw) * in_c * out_c];
            for (int ic = 0; ic < in_c; ++ic) {
              const T xv = xr[ic];
              if (xv == T(0)) continue;
              const T* wc = wr + static_cast<std::size_t>(ic) * out_c;
              for (int oc = 0; oc < out_c; ++oc) acc[static_cast<std::size_t>(oc)] += xv * wc[oc];
            }
          }
        }
        T* yr = &y.data[((static_cast<std::size_t>(bi) * out_h + oh) * out_w + ow) * out_c];
        for (int oc = 0; oc < out_c; ++oc) yr[oc] = acc[static_cast<std::size_t>(oc)];
      }
    }
  });
}

template <typename T>
void conv2d_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& g,
                     const ConvGeom& geo, TensorT<T>& dw, TensorT<T>& db, TensorT<T>& dx) {
  const auto [batch, in_h, in_w, in_c, out_h, out_w, out_c, kernel, stride, pad] = geo;
  // dW: one worker per (kh, kw, ic) slice; the batch x spatial reduction can
  // exceed 1e4 terms, so accumulate in double.
  parallel_for(static_cast<std::int64_t>(kernel) * kernel * in_c,
               [&](std::int64_t lo, std::int64_t hi) {
    std::vector<double> acc(static_cast<std::size_t>(out_c));
    for (std::int64_t slice = lo; slice < hi; ++slice) {
      const int kh = static_cast<int>(slice / (static_cast<std::int64_t>(kernel) * in_c));
      const int kw = static_cast<int>((slice / in_c) % kernel);
      const int ic = static_cast<int>(slice % in_c);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int bi = 0; bi < batch; ++bi) {
        for (int oh = 0; oh < out_h; ++oh) {
          const int ih = oh * stride - pad + kh;
          if (ih < 0 || ih >= in_h) continue;
          for (int ow = 0; ow < out_w; ++ow) {
            const int iw = ow * stride - pad + kw;
            if (iw < 0 || iw >= in_w) continue;
            const double xv = x.data[((static_cast<std::size_t>(bi) * in_h + ih) * in_w + iw) * in_c + ic];
            if (xv == 0.0) continue;
            const T* gr = &g.data[((static_cast<std::size_t>(bi) * out_h + oh) * out_w + ow) * out_c];
            for (int oc = 0; oc < out_c; ++oc) acc[static_cast<std::size_t>(oc)] += xv * gr[oc];
          }
        }
      }
      T* dwr = &dw.data[((static_cast<std::size_t>(kh) * kernel + kw) * in_c + ic) * out_c];
      for (int oc = 0; oc < out_c; ++oc) dwr[oc] = static_cast<T>(acc[static_cast<std::size_t>(oc)]);
    }
  });
  {  // db
    std::vector<double> acc(static_cast<std::size_t>(out_c), 0.0);
    const std::int64_t pixels = static_cast<std::int64_t>(batch) * out_h * out_w;
    for (std::int64_t p = 0; p < pixels; ++p) {
      const T* gr = &g.data[static_cast<std::size_t>(p) * out_c];
      for (int oc = 0; oc < out_c; ++oc) acc[static_cast<std::size_t>(oc)] += gr[oc];
    }
    for (int oc = 0; oc < out_c; ++oc) db.data[static_cast<std::size_t>(oc)] = static_cast<T>(acc[static_cast<std::size_t>(oc)]);
  }
  // dx
  parallel_for(static_cast<std::int64_t>(batch) * in_h, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t row = lo; row < hi; ++row) {
      const int bi = static_cast<int>(row / in_h);
      const int ih = static_cast<int>(row % in_h);
      for (int iw = 0; iw < in_w; ++iw) {
        T* dxr = &dx.data[((static_cast<std::size_t>(bi) * in_h + ih) * in_w + iw) * in_c];
        for (int ic = 0; ic < in_c; ++ic) dxr[ic] = T(0);
        for (int kh = 0; kh < kernel; ++kh) {
          const int oh_num = ih + pad - kh;
          if (oh_num < 0 || oh_num % stride != 0) continue;
          const int oh = oh_num / stride;
          if (oh >= out_h) continue;
          for (int kw = 0; kw < kernel; ++kw) {
            const int ow_num = iw + pad - kw;
            if (ow_num < 0 || ow_num % stride != 0) continue;
            const int ow = ow_num / stride;
            if (ow >= out_w) continue;
            const T* gr = &g.data[((static_cast<std::size_t>(bi) * out_h + oh) * out_w + ow) * out_c];
            const T* wr = &w.data[(static_cast<std::size_t>(kh) * kernel + kw) * in_c * out_c];
            for (int ic = 0; ic < in_c; ++ic) {
              const T* wc = wr + static_cast<std::size_t>(ic) * out_c;
              T acc = T(0);
              for (int oc = 0; oc < out_c; ++oc) acc += gr[oc] * wc[oc];
              dxr[ic] += acc;
            }
          }
        }
      }
    }
  });
}

// Transposed convolution, gather form: output (oh, ow) collects every input
// pixel (ih, iw) with ih*stride - pad + kh == oh.
template <typename T>
void tconv2d_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                     const ConvGeom& geo, TensorT<T>& y) {
  const auto [batch, in_h, in_w, in_c, out_h, out_w, out_c, kernel, stride, pad] = geo;
  parallel_for(static_cast<std::int64_t>(batch) * out_h, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<T> acc(static_cast<std::size_t>(out_c));
    for (std::int64_t row = lo; row < hi; ++row) {
      const int bi = static_cast<int>(row / out_h);
      const int oh = static_cast<int>(row % out_h);
      for (int ow = 0; ow < out_w; ++ow) {
        for (int oc = 0; oc < out_c; ++oc) acc[static_cast<std::size_t>(oc)] = b.data[static_cast<std::size_t>(oc)];
        for (int kh = 0; kh < kernel; ++kh) {
          const int ih_num = oh + pad - kh;
          if (ih_num < 0 || ih_num % stride != 0) continue;
          const int ih = ih_num / stride;
          if (ih >= in_h) continue;
          for (int kw = 0; kw < kernel; ++kw) {
            const int iw_num = ow + pad - kw;
            if (iw_num < 0 || iw_num % stride != 0) continue;
            const int iw = iw_num / stride;
            if (iw >= in_w) continue;
            const T* xr = &x.data[((static_cast<std::size_t>(bi) * in_h + ih) * in_w + iw) * in_c];
            const T* wr = &w.data[(static_cast<std::size_t>(kh) * kernel + kw) * in_c * out_c];
            for (int ic = 0; ic < in_c; ++ic) {
              const T xv = xr[ic];
              if (xv == T(0)) continue;
              const T* wc = wr + static_cast<std::size_t>(ic) * out_c;
              for (int oc = 0; oc < out_c; ++oc) acc[static_cast<std::size_t>(oc)] += xv * wc[oc];
            }
          }
        }
        T* yr = &y.data[((static_cast<std::size_t>(bi) * out_h + oh) * out_w + ow) * out_c];
        for (int oc = 0; oc < out_c; ++oc) yr[oc] = acc[static_cast<std::size_t>(oc)];
      }
    }
  });
}

template <typename T>
void tconv2d_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& g,
                      const ConvGeom& geo, TensorT<T>& dw, TensorT<T>& db, TensorT<T>& dx) {
  const auto [batch, in_h, in_w, in_c, out_h, out_w, out_c, kernel, stride, pad] = geo;
  parallel_for(static_cast<std::int64_t>(kernel) * kernel * in_c,
               [&](std::int64_t lo, std::int64_t hi) {
    std::vector<double> acc(static_cast<std::size_t>(out_c));
    for (std::int64_t slice = lo; slice < hi; ++slice) {
      const int kh = static_cast<int>(slice / (static_cast<std::int64_t>(kernel) * in_c));
      const int kw = static_cast<int>((slice / in_c) % kernel);
      const int ic = static_cast<int>(slice % in_c);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int bi = 0; bi < batch; ++bi) {
        for (int ih = 0; ih < in_h; ++ih) {
          const int oh = ih * stride - pad + kh;
          if (oh < 0 || oh >= out_h) continue;
          for (int iw = 0; iw < in_w; ++iw) {
            const int ow = iw * stride - pad + kw;
            if (ow < 0 || ow >= out_w) continue;
            const double xv = x.data[((static_cast<std::size_t>(bi) * in_h + ih) * in_w + iw) * in_c + ic];
            if (xv == 0.0) continue;
            const T* gr = &g.data[((static_cast<std::size_t>(bi) * out_h + oh) * out_w + ow) * out_c];
            for (int oc = 0; oc < out_c; ++oc) acc[static_cast<std::size_t>(oc)] += xv * gr[oc];
          }
        }
      }
      T* dwr = &dw.data[((static_cast<std::size_t>(kh) * kernel + kw) * in_c + ic) * out_c];
      for (int oc = 0; oc < out_c; ++oc) dwr[oc] = static_cast<T>(acc[static_cast<std::size_t>(oc)]);
    }
  });
  {  // db
    std::vector<double> acc(static_cast<std::size_t>(out_c), 0.0);
    const std::int64_t pixels = static_cast<std::int64_t>(batch) * out_h * out_w;
    for (std::int64_t p = 0; p < pixels; ++p) {
      const T* gr = &g.data[static_cast<std::size_t>(p) * out_c];
      for (int oc = 0; oc < out_c; ++oc) acc[static_cast<std::size_t>(oc)] += gr[oc];
    }
    for (int oc = 0; oc < out_c; ++oc) db.data[static_cast<std::size_t>(oc)] = static_cast<T>(acc[static_cast<std::size_t>(oc)]);
  }
  // dx: scatter form of the forward, read as a gather over outputs.
  parallel_for(static_cast<std::int64_t>(batch) * in_h, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t row = lo; row < hi; ++row) {
      const int bi = static_cast<int>(row / in_h);
      const int ih = static_cast<int>(row % in_h);
      for (int iw = 0; iw < in_w; ++iw) {
        T* dxr = &dx.data[((static_cast<std::size_t>(bi) * in_h + ih) * in_w + iw) * in_c];
        for (int ic = 0; ic < in_c; ++ic) dxr[ic] = T(0);
        for (int kh = 0; kh < kernel; ++kh) {
          const int oh = ih * stride - pad + kh;
          if (oh < 0 || oh >= out_h) continue;
          for (int kw = 0; kw < kernel; ++kw) {
            const int ow = iw * stride - pad + kw;
            if (ow < 0 || ow >= out_w) continue;
            const T* gr = &g.data[((static_cast<std::size_t>(bi) * out_h + oh) * out_w + ow) * out_c];
            const T* wr = &w.data[(static_cast<std::size_t>(kh) * kernel + kw) * in_c * out_c];
            for (int ic = 0; ic < in_c; ++ic) {
              const T* wc = wr + static_cast<std::size_t>(ic) * out_c;
              T acc = T(0);
              for (int oc = 0; oc < out_c; ++oc) acc += gr[oc] * wc[oc];
              dxr[ic] += acc;
            }
          }
        }
      }
    }
  });
}

template <typename T>
ConvGeom make_conv_geom(const LayerPlan& plan, int batch) {
  const LayerSpec& s = plan.spec;
  ConvGeom geo;
  geo.batch = batch;
  if (s.kind == LayerKind::conv2d) {
    geo.in_h = plan.in_shape[0];
    geo.in_w = plan.in_shape[1];
    geo.in_c = plan.in_shape[2];
  } else {
    geo.in_h = s.in_height;
    geo.in_w = s.in_width;
    geo.in_c = s.in_channels;
  }
  geo.out_h = plan.out_shape[0];
  geo.out_w = plan.out_shape[1];
  geo.out_c = plan.out_shape[2];
  geo.kernel = s.kernel;
  geo.stride = s.stride;
  geo.pad = s.pad;
  return geo;
}

// Channels-last batchnorm over every axis except the last. Batch statistics
// in train mode (with running-average update), running statistics otherwise.
template <typename T>
void batchnorm_forward(const TensorT<T>& x, const TensorT<T>& gamma, const TensorT<T>& beta,
                       TensorT<T>* running_mean, TensorT<T>* running_var, Mode mode,
                       TensorT<T>& y, LayerCacheT<T>& cache) {
  const int feats = x.shape.back();
  const std::int64_t rows = x.numel() / feats;
  std::vector<T> mean(static_cast<std::size_t>(feats));
  std::vector<T> inv_std(static_cast<std::size_t>(feats));
  if (mode == Mode::train) {
    std::vector<double> sum(static_cast<std::size_t>(feats), 0.0);
    std::vector<double> sum_sq(static_cast<std::size_t>(feats), 0.0);
    for (std::int64_t r = 0; r < rows; ++r) {
      const T* xr = &x.data[static_cast<std::size_t>(r) * feats];
      for (int f = 0; f < feats; ++f) {
        const double v = xr[f];
        sum[static_cast<std::size_t>(f)] += v;
        sum_sq[static_cast<std::size_t>(f)] += v * v;
      }
    }
    const double inv_rows = 1.0 / static_cast<double>(rows);
    for (int f = 0; f < feats; ++f) {
      const double mu = sum[static_cast<std::size_t>(f)] * inv_rows;
      double var = sum_sq[static_cast<std::size_t>(f)] * inv_rows - mu * mu;
      if (var < 0.0) var = 0.0;  // guard f.p. cancellation
      mean[static_cast<std::size_t>(f)] = static_cast<T>(mu);
      inv_std[static_cast<std::size_t>(f)] = static_cast<T>(1.0 / std::sqrt(var + kBatchnormEps));
      if (running_mean && running_var) {
        T& rm = running_mean->data[static_cast<std::size_t>(f)];
        T& rv = running_var->data[static_cast<std::size_t>(f)];
        rm = static_cast<T>(kBatchnormMomentum * rm + (1.0 - kBatchnormMomentum) * mu);
        rv = static_cast<T>(kBatchnormMomentum * rv + (1.0 - kBatchnormMomentum) * var);
      }
    }
  } else {
    for (int f = 0; f < feats; ++f) {
      mean[static_cast<std::size_t>(f)] = running_mean->data[static_cast<std::size_t>(f)];
      const double var = running_var->data[static_cast<std::size_t>(f)];
      inv_std[static_cast<std::size_t>(f)] = static_cast<T>(1.0 / std::sqrt(var + kBatchnormEps));
    }
  }
  parallel_for(rows, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      const T* xr = &x.data[static_cast<std::size_t>(r) * feats];
      T* yr = &y.data[static_cast<std::size_t>(r) * feats];
      for (int f = 0; f < feats; ++f) {
        const std::size_t fi = static_cast<std::size_t>(f);
        yr[f] = gamma.data[fi] * ((xr[f] - mean[fi]) * inv_std[fi]) + beta.data[fi];
      }
    }
  });
  if (mode == Mode::train) {
    cache.mean = std::move(mean);
    cache.inv_std = std::move(inv_std);
  }
}

template <typename T>
void batchnorm_backward(const TensorT<T>& x, const TensorT<T>& gamma, const TensorT<T>& g,
                        const LayerCacheT<T>& cache, TensorT<T>& dgamma, TensorT<T>& dbeta,
                        TensorT<T>& dx) {
  const int feats = x.shape.back();
  const std::int64_t rows = x.numel() / feats;
  std::vector<double> sum_g(static_cast<std::size_t>(feats), 0.0);
  std::vector<double> sum_g_xhat(static_cast<std::size_t>(feats), 0.0);
  for (std::int64_t r = 0; r < rows; ++r) {
    const T* xr = &x.data[static_cast<std::size_t>(r) * feats];
    const T* gr = &g.data[static_cast<std::size_t>(r) * feats];
    for (int f = 0; f < feats; ++f) {
      const std::size_t fi = static_cast<std::size_t>(f);
      const double xhat = (xr[f] - cache.mean[fi]) * cache.inv_std[fi];
      sum_g[fi] += gr[f];
      sum_g_xhat[fi] += gr[f] * xhat;
    }
  }
  for (int f = 0; f < feats; ++f) {
    const std::size_t fi = static_cast<std::size_t>(f);
    dgamma.data[fi] = static_cast<T>(sum_g_xhat[fi]);
    dbeta.data[fi] = static_cast<T>(sum_g[fi]);
  }
  const double inv_rows = 1.0 / static_cast<double>(rows);
  parallel_for(rows, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      const T* xr = &x.data[static_cast<std::size_t>(r) * feats];
      const T* gr = &g.data[static_cast<std::size_t>(r) * feats];
      T* dxr = &dx.data[static_cast<std::size_t>(r) * feats];
      for (int f = 0; f < feats; ++f) {
        const std::size_t fi = static_cast<std::size_t>(f);
        const double xhat = (xr[f] - cache.mean[fi]) * cache.inv_std[fi];
        const double v = gr[f] - inv_rows * sum_g[fi] - xhat * inv_rows * sum_g_xhat[fi];
        dxr[f] = static_cast<T>(gamma.data[fi] * cache.inv_std[fi] * v);
      }
    }
  });
}

template <typename T>
T stable_sigmoid(T v) {
  if (v >= T(0)) {
    const T e = std::exp(-v);
    return T(1) / (T(1) + e);
  }
  const T e = std::exp(v);
  return e / (T(1) + e);
}

template <typename T>
void softmax_rows(const TensorT<T>& x, TensorT<T>& y) {
  const int feats = x.shape.back();
  const std::int64_t rows = x.numel() / feats;
  parallel_for(rows, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      const T* xr = &x.data[static_cast<std::size_t>(r) * feats];
      T* yr = &y.data[static_cast<std::size_t>(r) * feats];
      T max_v = xr[0];
      for (int f = 1; f < feats; ++f) max_v = std::max(max_v, xr[f]);
      double sum = 0.0;
      for (int f = 0; f < feats; ++f) {
        const double e = std::exp(static_cast<double>(xr[f] - max_v));
        yr[f] = static_cast<T>(e);
        sum += e;
      }
      const double inv = 1.0 / sum;
      for (int f = 0; f < feats; ++f) yr[f] = static_cast<T>(yr[f] * inv);
    }
  });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model construction

// Instantiates a spec: validates end-to-end shape compatibility, draws
// Xavier weights, zero biases, unit batchnorm scales. Errors name the
// offending layer index.
template <typename T>
ModelT<T> build_model_t(const ModelSpec& spec, Rng& rng) {
  if (spec.layers.empty()) {
    throw InvalidSpecError("model spec has no layers");
  }
  if (spec.input_shape.empty()) {
    throw InvalidSpecError("model spec has no input shape");
  }
  for (int d : spec.input_shape) {
    if (d <= 0) throw InvalidSpecError("model input extents must be positive");
  }
  ModelT<T> model;
  model.spec = spec;
  Shape cur = spec.input_shape;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    LayerPlan plan;
    plan.in_shape = cur;
    try {
      cur = layer_output_shape(spec.layers[i], cur, &plan.spec);
    } catch (const InvalidSpecError& e) {
      throw InvalidSpecError("layer " + std::to_string(i) + " (" +
                             layer_kind_name(spec.layers[i].kind) + "): " + e.what());
    }
    plan.out_shape = cur;
    model.plans.push_back(std::move(plan));
  }

  // Role contracts on the final activation.
  const LayerKind last = model.plans.back().spec.kind;
  const Shape& out = model.output_shape();
  switch (spec.role) {
    case Role::cls:
      if (spec.n_classes < 2) {
        throw InvalidSpecError("classifier spec needs n_classes >= 2");
      }
      if (last != LayerKind::softmax || out.size() != 1 || out[0] != spec.n_classes) {
        throw InvalidSpecError("classifier must end in softmax over n_classes=" +
                               std::to_string(spec.n_classes) + ", got " +
                               std::string(layer_kind_name(last)) + " " + shape_str(out));
      }
      break;
    case Role::dis:
      if (last != LayerKind::sigmoid || shape_numel(out) != 1) {
        throw InvalidSpecError("discriminator must end in sigmoid with a single output");
      }
      break;
    case Role::gen:
      if (last != LayerKind::sigmoid) {
        throw InvalidSpecError("generator must end in sigmoid to target the [0,1] range");
      }
      break;
  }

  model.params.resize(model.plans.size());
  model.buffers.resize(model.plans.size());
  std::int64_t expected = 0;
  for (std::size_t i = 0; i < model.plans.size(); ++i) {
    const LayerPlan& plan = model.plans[i];
    expected += layer_param_count(plan.spec, plan.in_shape);
    switch (plan.spec.kind) {
      case LayerKind::dense: {
        model.params[i].push_back(xavier_init<T>(plan.spec, rng));
        model.params[i].emplace_back(Shape{plan.spec.units}, T(0));
        break;
      }
      case LayerKind::conv2d:
      case LayerKind::tconv2d: {
        model.params[i].push_back(xavier_init<T>(plan.spec, rng));
        model.params[i].emplace_back(Shape{plan.spec.out_channels}, T(0));
        break;
      }
      case LayerKind::batchnorm: {
        model.params[i].emplace_back(Shape{plan.spec.features}, T(1));  // gamma
        model.params[i].emplace_back(Shape{plan.spec.features}, T(0));  // beta
        model.buffers[i].emplace_back(Shape{plan.spec.features}, T(0));  // running mean
        model.buffers[i].emplace_back(Shape{plan.spec.features}, T(1));  // running var
        break;
      }
      default:
        break;
    }
  }
  if (model.param_count() != expected) {
    throw InvalidSpecError("internal: parameter count mismatch vs closed form");
  }
  return model;
}

Model build_model(const ModelSpec& spec, Rng& rng);

// Closed-form learnable parameter count of a spec, summed over layers.
std::int64_t model_param_count(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Forward / backward

template <typename T>
ForwardTraceT<T> forward(ModelT<T>& model, const TensorT<T>& input, Mode mode, Rng& rng) {
  const Shape& per_sample = model.spec.input_shape;
  if (input.rank() != static_cast<int>(per_sample.size()) + 1 ||
      !std::equal(per_sample.begin(), per_sample.end(), input.shape.begin() + 1)) {
    throw DimensionError("model expects input [batch]+" + shape_str(per_sample) +
                         ", got " + shape_str(input.shape));
  }
  const int batch = input.dim(0);

  ForwardTraceT<T> trace;
  trace.mode = mode;
  trace.acts.reserve(model.plans.size() + 1);
  trace.caches.resize(model.plans.size());
  trace.acts.push_back(input);

  for (std::size_t i = 0; i < model.plans.size(); ++i) {
    const LayerPlan& plan = model.plans[i];
    const TensorT<T>& x = trace.acts.back();
    Shape out_shape;
    out_shape.reserve(plan.out_shape.size() + 1);
    out_shape.push_back(batch);
    out_shape.insert(out_shape.end(), plan.out_shape.begin(), plan.out_shape.end());
    TensorT<T> y(out_shape);
    LayerCacheT<T>& cache = trace.caches[i];

    switch (plan.spec.kind) {
      case LayerKind::dense:
        detail::dense_forward(x, model.params[i][0], model.params[i][1], y);
        break;
      case LayerKind::conv2d:
        detail::conv2d_forward(x, model.params[i][0], model.params[i][1],
                               detail::make_conv_geom<T>(plan, batch), y);
        break;
      case LayerKind::tconv2d:
        detail::tconv2d_forward(x, model.params[i][0], model.params[i][1],
                                detail::make_conv_geom<T>(plan, batch), y);
        break;
      case LayerKind::batchnorm:
        detail::batchnorm_forward(x, model.params[i][0], model.params[i][1],
                                  &model.buffers[i][0], &model.buffers[i][1], mode, y,
                                  cache);
        break;
      case LayerKind::dropout: {
        if (mode == Mode::infer || plan.spec.rate == 0.0) {
          y.data = x.data;
        } else {
          // Inverted dropout: scale kept units by 1/(1-rate) so the
          // expected activation is unchanged. Mask drawn sequentially from
          // the caller's rng.
          const T keep_scale = static_cast<T>(1.0 / (1.0 - plan.spec.rate));
          cache.mask = TensorT<T>(y.shape);
          for (std::int64_t j = 0; j < y.numel(); ++j) {
            cache.mask.at(j) = (rng.uniform() >= plan.spec.rate) ? keep_scale : T(0);
            y.at(j) = x.at(j) * cache.mask.at(j);
          }
        }
        break;
      }
      case LayerKind::leaky_relu: {
        const T a = static_cast<T>(plan.spec.alpha);
        parallel_for(y.numel(), [&](std::int64_t lo, std::int64_t hi) {
          for (std::int64_t j = lo; j < hi; ++j) {
            const T v = x.at(j);
            y.at(j) = v > T(0) ? v : a * v;
          }
        });
        break;
      }
      case LayerKind::sigmoid:
        parallel_for(y.numel(), [&](std::int64_t lo, std::int64_t hi) {
          for (std::int64_t j = lo; j < hi; ++j) y.at(j) = detail::stable_sigmoid(x.at(j));
        });
        break;
      case LayerKind::softmax:
        detail::softmax_rows(x, y);
        break;
      case LayerKind::flatten:
        y.data = x.data;
        break;
    }
    trace.acts.push_back(std::move(y));
  }
  return trace;
}

// Inference-only forward on an immutable model (infer or mc_dropout mode;
// train mode needs the mutable overload for the batchnorm running averages).
template <typename T>
ForwardTraceT<T> forward(const ModelT<T>& model, const TensorT<T>& input, Mode mode,
                         Rng& rng) {
  if (mode == Mode::train) {
    throw StateError("train-mode forward requires a mutable model");
  }
  return forward(const_cast<ModelT<T>&>(model), input, mode, rng);
}

// Convenience: inference forward, final activation only.
template <typename T>
TensorT<T> predict(const ModelT<T>& model, const TensorT<T>& input) {
  Rng unused(0);
  return forward(model, input, Mode::infer, unused).output();
}

// Inference forward returning the pre-softmax activation of a classifier
// (the bottleneck vector the post hoc statistics are fitted on).
template <typename T>
TensorT<T> classifier_logits(const ModelT<T>& model, const TensorT<T>& input) {
  if (model.plans.back().spec.kind != LayerKind::softmax) {
    throw InvalidModelError("logits require a softmax-terminated classifier");
  }
  Rng unused(0);
  auto trace = forward(model, input, Mode::infer, unused);
  return trace.acts[trace.acts.size() - 2];
}

template <typename T>
GradsT<T> backward(const ModelT<T>& model, const ForwardTraceT<T>& trace,
                   const TensorT<T>& output_grad) {
  if (trace.mode != Mode::train) {
    throw StateError("backward requires a train-mode trace");
  }
  if (trace.acts.size() != model.plans.size() + 1) {
    throw StateError("trace does not match model depth");
  }
  check_same_shape(output_grad, trace.acts.back(), "backward output_grad");
  const int batch = trace.acts[0].dim(0);

  GradsT<T> grads;
  grads.params.resize(model.plans.size());
  TensorT<T> g = output_grad;

  for (int li = static_cast<int>(model.plans.size()) - 1; li >= 0; --li) {
    const std::size_t i = static_cast<std::size_t>(li);
    const LayerPlan& plan = model.plans[i];
    const TensorT<T>& x = trace.acts[i];
    const LayerCacheT<T>& cache = trace.caches[i];
    TensorT<T> dx(x.shape);

    switch (plan.spec.kind) {
      case LayerKind::dense: {
        TensorT<T> dw(model.params[i][0].shape);
        TensorT<T> db(model.params[i][1].shape);
        detail::dense_backward(x, model.params[i][0], g, dw, db, dx);
        grads.params[i] = {std::move(dw), std::move(db)};
        break;
      }
      case LayerKind::conv2d: {
        TensorT<T> dw(model.params[i][0].shape);
        TensorT<T> db(model.params[i][1].shape);
        detail::conv2d_backward(x, model.params[i][0], g,
                                detail::make_conv_geom<T>(plan, batch), dw, db, dx);
        grads.params[i] = {std::move(dw), std::move(db)};
        break;
      }
      case LayerKind::tconv2d: {
        TensorT<T> dw(model.params[i][0].shape);
        TensorT<T> db(model.params[i][1].shape);
        detail::tconv2d_backward(x, model.params[i][0], g,
                                 detail::make_conv_geom<T>(plan, batch), dw, db, dx);
        grads.params[i] = {std::move(dw), std::move(db)};
        break;
      }
      case LayerKind::batchnorm: {
        if (cache.mean.empty()) {
          throw StateError("batchnorm backward needs train-mode batch statistics");
        }
        TensorT<T> dgamma(model.params[i][0].shape);
        TensorT<T> dbeta(model.params[i][1].shape);
        detail::batchnorm_backward(x, model.params[i][0], g, cache, dgamma, dbeta, dx);
        grads.params[i] = {std::move(dgamma), std::move(dbeta)};
        break;
      }
      case LayerKind::dropout: {
        if (cache.mask.data.empty()) {
          dx.data = g.data;  // rate 0: identity
        } else {
          for (std::int64_t j = 0; j < dx.numel(); ++j) {
            dx.at(j) = g.at(j) * cache.mask.at(j);
          }
        }
        break;
      }
      case LayerKind::leaky_relu: {
        const T a = static_cast<T>(plan.spec.alpha);
        for (std::int64_t j = 0; j < dx.numel(); ++j) {
          dx.at(j) = g.at(j) * (x.at(j) > T(0) ? T(1) : a);
        }
        break;
      }
      case LayerKind::sigmoid: {
        const TensorT<T>& y = trace.acts[i + 1];
        for (std::int64_t j = 0; j < dx.numel(); ++j) {
          const T yv = y.at(j);
          dx.at(j) = g.at(j) * yv * (T(1) - yv);
        }
        break;
      }
      case LayerKind::softmax: {
        const TensorT<T>& y = trace.acts[i + 1];
        const int feats = y.shape.back();
        const std::int64_t rows = y.numel() / feats;
        for (std::int64_t r = 0; r < rows; ++r) {
          const T* yr = &y.data[static_cast<std::size_t>(r) * feats];
          const T* gr = &g.data[static_cast<std::size_t>(r) * feats];
          T* dxr = &dx.data[static_cast<std::size_t>(r) * feats];
          double dot = 0.0;
          for (int f = 0; f < feats; ++f) dot += static_cast<double>(gr[f]) * yr[f];
          for (int f = 0; f < feats; ++f) {
            dxr[f] = yr[f] * (gr[f] - static_cast<T>(dot));
          }
        }
        break;
      }
      case LayerKind::flatten:
        dx.data = g.data;
        break;
    }
    g = std::move(dx);
  }
  grads.input = std::move(g);
  return grads;
}

}  // namespace oodkit

#endif  // OODKIT_MODEL_HPP_
