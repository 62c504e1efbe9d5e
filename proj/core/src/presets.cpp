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

#include "oodkit/presets.hpp"

#include "oodkit/errors.hpp"

namespace oodkit {

namespace {

void check_image(const ArchConfig& config) {
  const Shape& s = config.input_shape;
  if (s.size() != 3 || s[2] != 3) {
    throw InvalidSpecError("image presets expect an (h, w, 3) input shape");
  }
  if (s[0] % 8 != 0 || s[1] % 8 != 0) {
    throw InvalidSpecError(
        "image extents must be divisible by 8 (three stride-2 halvings)");
  }
}

}  // namespace

ModelSpec make_classifier_spec(const ArchConfig& config) {
  ModelSpec spec;
  spec.role = Role::cls;
  spec.n_classes = config.n_classes;
  spec.input_shape = config.input_shape;
  if (config.is_image()) {
    check_image(config);
    for (int channels : config.cls_channels) {
      spec.layers.push_back(LayerSpec::make_conv2d(0, channels, 5, 2, 2));
      spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
    }
    spec.layers.push_back(LayerSpec::make_flatten());
    spec.layers.push_back(LayerSpec::make_dense(config.cls_dense));
    spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
    spec.layers.push_back(LayerSpec::make_dropout(config.cls_dropout));
  } else {
    for (int width : config.mlp_hidden) {
      spec.layers.push_back(LayerSpec::make_dense(width));
      spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
    }
    spec.layers.push_back(LayerSpec::make_dropout(config.cls_dropout));
  }
  spec.layers.push_back(LayerSpec::make_dense(config.n_classes));
  spec.layers.push_back(LayerSpec::make_softmax());
  return spec;
}

ModelSpec make_discriminator_spec(const ArchConfig& config) {
  ModelSpec spec;
  spec.role = Role::dis;
  spec.input_shape = config.input_shape;
  if (config.is_image()) {
    check_image(config);
    for (int channels : config.dis_channels) {
      spec.layers.push_back(LayerSpec::make_conv2d(0, channels, 5, 2, 2));
      spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
      spec.layers.push_back(LayerSpec::make_dropout(config.dis_dropout));
    }
    spec.layers.push_back(LayerSpec::make_flatten());
  } else {
    for (int width : config.mlp_hidden) {
      spec.layers.push_back(LayerSpec::make_dense(width));
      spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
      spec.layers.push_back(LayerSpec::make_dropout(config.dis_dropout));
    }
  }
  spec.layers.push_back(LayerSpec::make_dense(1));
  spec.layers.push_back(LayerSpec::make_sigmoid());
  return spec;
}

ModelSpec make_generator_spec(const ArchConfig& config) {
  ModelSpec spec;
  spec.role = Role::gen;
  spec.input_shape = {config.noise_dim};
  if (config.is_image()) {
    check_image(config);
    if (config.gen_channels.size() != 2) {
      throw InvalidSpecError("generator presets expect two intermediate channel widths");
    }
    const int base_h = config.input_shape[0] / 8;
    const int base_w = config.input_shape[1] / 8;
    const int base_c = config.gen_base_channels;
    spec.layers.push_back(LayerSpec::make_dense(base_h * base_w * base_c));
    spec.layers.push_back(LayerSpec::make_batchnorm());
    spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
    // Three tconv blocks; the last is the bare transposed convolution.
    spec.layers.push_back(
        LayerSpec::make_tconv2d(base_c, config.gen_channels[0], 5, 2, 2, 1, base_h, base_w));
    spec.layers.push_back(LayerSpec::make_batchnorm());
    spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
    spec.layers.push_back(
        LayerSpec::make_tconv2d(config.gen_channels[0], config.gen_channels[1], 5, 2, 2, 1));
    spec.layers.push_back(LayerSpec::make_batchnorm());
    spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
    spec.layers.push_back(LayerSpec::make_tconv2d(config.gen_channels[1], 3, 5, 2, 2, 1));
  } else {
    const int dim = config.input_shape[0];
    for (int width : config.mlp_hidden) {
      spec.layers.push_back(LayerSpec::make_dense(width));
      spec.layers.push_back(LayerSpec::make_batchnorm());
      spec.layers.push_back(LayerSpec::make_leaky_relu(config.leaky_alpha));
    }
    spec.layers.push_back(LayerSpec::make_dense(dim));
  }
  spec.layers.push_back(LayerSpec::make_sigmoid());
  return spec;
}

}  // namespace oodkit
