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

#ifndef OODKIT_PRESETS_HPP_
#define OODKIT_PRESETS_HPP_

#include <vector>

#include "oodkit/model.hpp"

namespace oodkit {

// Architecture knobs for the three networks. The topology is fixed — the
// discriminator uses two 5x5 stride-2 convolutions with leaky ReLU and
// dropout 0.3 into a single sigmoid unit, the generator a dense block plus
// three 5x5 transposed-convolution blocks with batchnorm — while widths
// scale with these settings (the reference configuration uses 64/128
// discriminator maps; the desk-scale defaults are leaner).
struct ArchConfig {
  int n_classes = 4;
  Shape input_shape = {32, 32, 3};  // (h, w, 3) image or (k) vector
  int noise_dim = 100;

  std::vector<int> cls_channels = {16, 32};
  int cls_dense = 64;
  double cls_dropout = 0.3;

  std::vector<int> dis_channels = {16, 32};
  double dis_dropout = 0.3;

  int gen_base_channels = 64;
  std::vector<int> gen_channels = {32, 16};  // first two tconv blocks

  double leaky_alpha = 0.2;

  // vector-mode widths
  std::vector<int> mlp_hidden = {64, 64};

  bool is_image() const { return input_shape.size() == 3; }
};

ModelSpec make_classifier_spec(const ArchConfig& config);
ModelSpec make_generator_spec(const ArchConfig& config);
ModelSpec make_discriminator_spec(const ArchConfig& config);

}  // namespace oodkit

#endif  // OODKIT_PRESETS_HPP_
