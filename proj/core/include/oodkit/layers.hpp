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

#ifndef OODKIT_LAYERS_HPP_
#define OODKIT_LAYERS_HPP_

#include <string>
#include <vector>

#include "oodkit/errors.hpp"
#include "oodkit/tensor.hpp"

namespace oodkit {

enum class LayerKind {
  dense,
  conv2d,
  tconv2d,
  batchnorm,
  dropout,
  leaky_relu,
  sigmoid,
  softmax,
  flatten,
};

const char* layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

// One layer description. Only the fields belonging to `kind` are meaningful.
// Convolutions operate channels-last (batch, height, width, channel);
// weights are stored (kh, kw, in_c, out_c).
struct LayerSpec {
  LayerKind kind = LayerKind::dense;

  int units = 0;        // dense: output feature count
  int in_features = 0;  // dense: input feature count (0 = infer from input)

  int in_channels = 0;   // conv2d/tconv2d (0 = infer from input)
  int out_channels = 0;  // conv2d/tconv2d
  int kernel = 5;
  int stride = 2;
  int pad = 2;
  int output_pad = 1;  // tconv2d only
  // tconv2d may consume a flat activation (e.g. straight from a dense
  // layer); the declared geometry says how to view it.
  int in_height = 0;
  int in_width = 0;

  int features = 0;  // batchnorm (0 = infer from input)

  double rate = 0.3;   // dropout
  double alpha = 0.2;  // leaky_relu

  static LayerSpec make_dense(int units, int in_features = 0);
  static LayerSpec make_conv2d(int in_c, int out_c, int kernel = 5, int stride = 2,
                               int pad = 2);
  static LayerSpec make_tconv2d(int in_c, int out_c, int kernel = 5, int stride = 2,
                                int pad = 2, int output_pad = 1, int in_h = 0,
                                int in_w = 0);
  static LayerSpec make_batchnorm(int features = 0);
  static LayerSpec make_dropout(double rate = 0.3);
  static LayerSpec make_leaky_relu(double alpha = 0.2);
  static LayerSpec make_sigmoid();
  static LayerSpec make_softmax();
  static LayerSpec make_flatten();
};

// Throws InvalidSpecError if the hyperparameters are out of range for the
// layer kind (non-positive kernel/stride/channels, rate outside [0,1), ...).
void validate_layer_spec(const LayerSpec& spec);

bool layer_has_weights(LayerKind kind);

// Per-sample output shape for a given per-sample input shape. Resolves
// inferred fields (in_channels, features, tconv input view) into `resolved`.
Shape layer_output_shape(const LayerSpec& spec, const Shape& in_shape,
                         LayerSpec* resolved);

// Learnable parameter count, given the per-sample input shape.
std::int64_t layer_param_count(const LayerSpec& spec, const Shape& in_shape);

}  // namespace oodkit

#endif  // OODKIT_LAYERS_HPP_
