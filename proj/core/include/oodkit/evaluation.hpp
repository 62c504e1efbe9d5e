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

#ifndef OODKIT_EVALUATION_HPP_
#define OODKIT_EVALUATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "oodkit/class_stats.hpp"
#include "oodkit/metrics.hpp"
#include "oodkit/model.hpp"
#include "oodkit/scores.hpp"
#include "oodkit/training.hpp"

namespace oodkit {

struct ScoreKindReport {
  ScoreKind kind = ScoreKind::softmax;
  ThresholdResult threshold;
  double aupr_in = 0.0;
  double aupr_out = 0.0;
};

struct EvalReport {
  double classifier_accuracy = 0.0;
  std::vector<ScoreKindReport> scores;

  const ScoreKindReport& for_kind(ScoreKind kind) const;
  std::string to_text() const;
};

// Fraction of D_in test samples whose softmax argmax matches the label.
double classifier_accuracy(const Model& cls, const LabeledBatch& din_test);

// Scores both populations with each requested kind, normalizes orientation
// (MI is an uncertainty and gets negated), and assembles threshold and
// AUPR metrics. `stats` may be null when no kind needs it.
EvalReport run_evaluation(const Model& cls, const ClassConditionalStats* stats,
                          const LabeledBatch& din_test, const LabeledBatch& dout,
                          const std::vector<ScoreKind>& kinds, std::uint64_t seed,
                          int mc_passes = kDefaultMcDropoutPasses);

// The scored populations backing one report row, exposed for PR-curve
// export.
ScoredPopulation score_populations(const Model& cls, const ClassConditionalStats* stats,
                                   const LabeledBatch& din_test, const LabeledBatch& dout,
                                   ScoreKind kind, std::uint64_t seed,
                                   int mc_passes = kDefaultMcDropoutPasses);

void save_eval_report(const EvalReport& report, const std::string& path);

}  // namespace oodkit

#endif  // OODKIT_EVALUATION_HPP_
