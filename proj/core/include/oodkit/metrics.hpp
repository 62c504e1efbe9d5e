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

#ifndef OODKIT_METRICS_HPP_
#define OODKIT_METRICS_HPP_

#include <string>
#include <vector>

namespace oodkit {

enum class Orientation { high_is_in, high_is_out };

// Confidence scores of an in-distribution and an out-of-distribution
// population. Uncertainty-style scores (MC-dropout MI) carry
// high_is_out and are negated on normalization so one code path serves
// every score kind.
struct ScoredPopulation {
  std::vector<double> scores_in;
  std::vector<double> scores_out;
  Orientation orientation = Orientation::high_is_in;

  // high_is_in view of the same population.
  ScoredPopulation normalized() const;
};

// Optimal-threshold summary: detection_accuracy = 1 - min_tau{error} with
// error(tau) = P(q(x_in) <= tau) P(x_in) + P(q(x_out) > tau) P(x_out) and
// empirical priors from the sample counts.
struct ThresholdResult {
  double tau = 0.0;
  double min_error = 0.0;
  double detection_accuracy = 0.0;
  double p_in = 0.0;
  double p_out = 0.0;
};

// Exhaustive sweep over midpoints between consecutive distinct pooled
// scores plus sentinels beyond both ends; ties resolved toward the
// smallest tau. Both populations must be nonempty and finite.
ThresholdResult optimal_threshold(const ScoredPopulation& pop);

enum class PositiveClass { in_dist, out_dist };

struct PrPoint {
  double threshold = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};

// Precision-recall curve by descending-confidence sweep over distinct
// thresholds, samples tied at a threshold entering atomically. The curve
// starts at recall 0 and ends at recall 1. With positive == out_dist the
// two score sets swap roles (low confidence predicts the positive class).
std::vector<PrPoint> pr_curve(const ScoredPopulation& pop, PositiveClass positive);

// Average precision: sum of recall increments times the precision at each
// new point.
double aupr(const std::vector<PrPoint>& curve);

// "threshold,recall,precision" rows.
std::string pr_curve_csv(const std::vector<PrPoint>& curve);

}  // namespace oodkit

#endif  // OODKIT_METRICS_HPP_
