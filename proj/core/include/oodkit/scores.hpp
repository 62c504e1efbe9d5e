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

#ifndef OODKIT_SCORES_HPP_
#define OODKIT_SCORES_HPP_

#include <string>
#include <utility>
#include <vector>

#include "oodkit/class_stats.hpp"
#include "oodkit/model.hpp"
#include "oodkit/rng.hpp"
#include "oodkit/tensor.hpp"

namespace oodkit {

enum class ScoreKind { softmax, cossim, chi2, mi };

const char* score_kind_name(ScoreKind kind);
ScoreKind score_kind_from_name(const std::string& name);

// One scored sample. q is a confidence for softmax/cossim/chi2 (high =
// in-distribution) and an uncertainty for mi (high = OOD); d_m is only
// meaningful for chi2.
struct ScoreRecord {
  ScoreKind kind = ScoreKind::softmax;
  double q = 0.0;
  int predicted_class = -1;
  double d_m = 0.0;

  std::string to_text() const;
};

// Cosine similarity between a logit vector and the fitted mean of class c.
// Both vectors must have positive norm.
double cosine_score(const std::vector<double>& x, const ClassConditionalStats& stats,
                    int class_id);

// Chi-square tail confidence 1 - CDF_{chi2_dof}(d_m^2): 1 at the class mean,
// strictly decreasing in the Mahalanobis distance.
double chi2_confidence(double d_m, int dof);

// Largest softmax probability and its argmax (ties: lowest class index).
std::pair<double, int> softmax_score(const std::vector<double>& probs_row);

constexpr int kDefaultMcDropoutPasses = 100;

// Mutual-information uncertainty from T stochastic forward passes with
// dropout active: H(mean_t p_t) - mean_t H(p_t), natural-log entropies.
// The model must contain at least one dropout layer and T >= 2.
double mc_dropout_mi(const Model& model, const Tensor& input,
                     int passes /* = kDefaultMcDropoutPasses */, Rng& rng);

// Batched variant: one MI value per row of `inputs`.
std::vector<double> mc_dropout_mi_batch(const Model& model, const Tensor& inputs,
                                        int passes, Rng& rng);

// Scores one classifier output (logits + softmax row) under `kind`.
// softmax/cossim/chi2 only; MI needs forward passes, not a single output.
ScoreRecord score_output(ScoreKind kind, const std::vector<double>& logits,
                         const std::vector<double>& probs,
                         const ClassConditionalStats* stats);

// Scores a whole population of samples with one classifier. Runs batched
// inference internally; `stats` may be null for softmax/mi.
std::vector<ScoreRecord> score_samples(const Model& cls, const Tensor& samples,
                                       ScoreKind kind, const ClassConditionalStats* stats,
                                       int mc_passes, Rng& rng);

}  // namespace oodkit

#endif  // OODKIT_SCORES_HPP_
