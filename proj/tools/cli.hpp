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

#ifndef OODKIT_TOOLS_CLI_HPP_
#define OODKIT_TOOLS_CLI_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "oodkit/metrics.hpp"
#include "oodkit/scores.hpp"
#include "oodkit/training.hpp"

namespace oodkit::cli {

// A validated command line. One workspace directory (--out) holds every
// pipeline artifact; stages read their inputs from it by fixed names:
//   data/din_train.json, data/din_test.json, data/dout.json
//   train_<mode>/checkpoint.oodc, train_<mode>/train_log.csv
//   stats_<mode>.json, report_<mode>.json, score_<mode>_<kind>.json
//   pr_<mode>_<kind>_<positive>.csv
struct CommandPlan {
  std::string subcommand;  // gen-data | train | fit-stats | score | eval | pr-curve
  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // raw section.key=value strings

  TrainMode mode = TrainMode::joint;
  std::vector<ScoreKind> scores = {ScoreKind::softmax, ScoreKind::cossim, ScoreKind::chi2,
                                   ScoreKind::mi};
  std::string input_path;                        // score
  ScoreKind kind = ScoreKind::softmax;           // score / pr-curve
  PositiveClass positive = PositiveClass::in_dist;  // pr-curve
};

// Parses argv (excluding argv[0]). Unknown flags, a missing subcommand or
// bad flag values raise UsageError with the offending flag in the message.
CommandPlan parse_command(const std::vector<std::string>& args);

// Runs the plan. Returns 0 iff every requested artifact was written and
// validated; errors propagate as oodkit exceptions.
int execute(const CommandPlan& plan);

// Usage text for error paths.
std::string usage_text();

}  // namespace oodkit::cli

#endif  // OODKIT_TOOLS_CLI_HPP_
