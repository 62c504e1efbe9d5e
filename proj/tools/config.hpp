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

#ifndef OODKIT_TOOLS_CONFIG_HPP_
#define OODKIT_TOOLS_CONFIG_HPP_

#include <string>
#include <vector>

#include "oodkit/class_stats.hpp"
#include "oodkit/optim.hpp"
#include "oodkit/presets.hpp"
#include "oodkit/scores.hpp"
#include "oodkit/synthetic.hpp"

namespace oodkit::cli {

// Everything a pipeline run is parameterized by. Sections mirror the
// library config types; file values override the desk-scale defaults and
// --set overrides win over file values.
struct RunConfig {
  SyntheticSpec dataset;
  ArchConfig model;
  TrainSchedule train;
  double epsilon = kAutoEpsilon;
  int mc_passes = kDefaultMcDropoutPasses;

  // Derives the model input shape / class count from the dataset section.
  void finalize();
};

// Loads defaults, merges the optional JSON config file, applies
// "section.key=value" overrides, finalizes.
RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::string>& overrides,
                          std::uint64_t seed);

}  // namespace oodkit::cli

#endif  // OODKIT_TOOLS_CONFIG_HPP_
