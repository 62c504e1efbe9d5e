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

#ifndef OODKIT_TESTS_METRIC_ORACLES_HPP_
#define OODKIT_TESTS_METRIC_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "oodkit/rng.hpp"

namespace oodkit::testing {

// Brute-force oracles for the evaluation metrics: direct counting over
// every threshold, no sorting tricks, no shared code with the library
// implementations.

struct OracleThreshold {
  double min_error = 1.0;
  double detection_accuracy = 0.0;
};

inline double oracle_error_at(const std::vector<double>& in_scores,
                              const std::vector<double>& out_scores, double tau) {
  int in_below = 0;
  for (double s : in_scores) {
    if (s <= tau) ++in_below;
  }
  int out_above = 0;
  for (double s : out_scores) {
    if (s > tau) ++out_above;
  }
  const double n_in = static_cast<double>(in_scores.size());
  const double n_out = static_cast<double>(out_scores.size());
  const double p_in = n_in / (n_in + n_out);
  const double p_out = n_out / (n_in + n_out);
  return (in_below / n_in) * p_in + (out_above / n_out) * p_out;
}

inline OracleThreshold brute_force_threshold(const std::vector<double>& in_scores,
                                             const std::vector<double>& out_scores) {
  std::vector<double> taus;
  for (double s : in_scores) taus.push_back(s);
  for (double s : out_scores) taus.push_back(s);
  double lo = *std::min_element(taus.begin(), taus.end());
  double hi = *std::max_element(taus.begin(), taus.end());
  taus.push_back(lo - 1.0);
  taus.push_back(hi + 1.0);
  // Midpoints of every pair cover all intervals between scores.
  const std::size_t n = taus.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      taus.push_back(0.5 * (taus[i] + taus[j]));
    }
  }
  OracleThreshold best;
  for (double tau : taus) {
    best.min_error = std::min(best.min_error, oracle_error_at(in_scores, out_scores, tau));
  }
  best.detection_accuracy = 1.0 - best.min_error;
  return best;
}

// Minimum error over a dense, evenly spaced threshold grid (refinement
// check: nothing between the candidate midpoints does better).
inline double dense_grid_min_error(const std::vector<double>& in_scores,
                                   const std::vector<double>& out_scores,
                                   int points_per_sample) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double s : in_scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  for (double s : out_scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  lo -= 1.0;
  hi += 1.0;
  const int n = points_per_sample * static_cast<int>(in_scores.size() + out_scores.size() + 2);
  double best = 1.0;
  for (int i = 0; i <= n; ++i) {
    const double tau = lo + (hi - lo) * i / n;
    best = std::min(best, oracle_error_at(in_scores, out_scores, tau));
  }
  return best;
}

// Average precision by definition: enumerate every distinct threshold
// (descending confidence for the positive class), count tied samples
// atomically, and accumulate recall-increment * precision.
inline double brute_force_average_precision(const std::vector<double>& pos,
                                            const std::vector<double>& neg) {
  std::vector<double> thresholds;
  for (double s : pos) thresholds.push_back(s);
  for (double s : neg) thresholds.push_back(s);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double ap = 0.0;
  double prev_recall = 0.0;
  for (double tau : thresholds) {
    int tp = 0, fp = 0;
    for (double s : pos) {
      if (s >= tau) ++tp;
    }
    for (double s : neg) {
      if (s >= tau) ++fp;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(pos.size());
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

// A random strictly increasing transform a*f(b*x + c) + d with a, b > 0 and
// f one of several strictly monotone maps.
inline std::function<double(double)> random_monotone_transform(Rng& rng) {
  const double a = rng.uniform(0.5, 3.0);
  const double b = rng.uniform(0.1, 2.0);
  const double c = rng.uniform(-1.0, 1.0);
  const double d = rng.uniform(-2.0, 2.0);
  const int which = static_cast<int>(rng.below(5));
  return [=](double x) {
    const double z = b * x + c;
    double f = 0.0;
    switch (which) {
      case 0: f = z; break;
      case 1: f = std::tanh(z); break;
      case 2: f = std::atan(z); break;
      case 3: f = std::cbrt(z); break;
      default: f = std::exp(std::min(z, 30.0)); break;
    }
    return a * f + d;
  };
}

}  // namespace oodkit::testing

#endif  // OODKIT_TESTS_METRIC_ORACLES_HPP_
