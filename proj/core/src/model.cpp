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

#include "oodkit/model.hpp"

namespace oodkit {

const char* role_name(Role role) {
  switch (role) {
    case Role::cls: return "cls";
    case Role::gen: return "gen";
    case Role::dis: return "dis";
  }
  return "?";
}

Role role_from_name(const std::string& name) {
  if (name == "cls") return Role::cls;
  if (name == "gen") return Role::gen;
  if (name == "dis") return Role::dis;
  throw InvalidSpecError("unknown model role '" + name + "'");
}

Model build_model(const ModelSpec& spec, Rng& rng) { return build_model_t<float>(spec, rng); }

std::int64_t model_param_count(const ModelSpec& spec) {
  std::int64_t total = 0;
  Shape cur = spec.input_shape;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    total += layer_param_count(spec.layers[i], cur);
    cur = layer_output_shape(spec.layers[i], cur, nullptr);
  }
  return total;
}

}  // namespace oodkit
