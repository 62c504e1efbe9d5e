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

#include "oodkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "oodkit/errors.hpp"

namespace oodkit {

namespace {

void check_finite(const std::vector<double>& scores, const char* which) {
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw DomainError(std::string("non-finite score in ") + which + " population");
    }
  }
}

}  // namespace

ScoredPopulation ScoredPopulation::normalized() const {
  if (orientation == Orientation::high_is_in) return *this;
  ScoredPopulation flipped;
  flipped.orientation = Orientation::high_is_in;
  flipped.scores_in.reserve(scores_in.size());
  flipped.scores_out.reserve(scores_out.size());
  for (double s : scores_in) flipped.scores_in.push_back(-s);
  for (double s : scores_out) flipped.scores_out.push_back(-s);
  return flipped;
}

ThresholdResult optimal_threshold(const ScoredPopulation& raw) {
  if (raw.scores_in.empty() || raw.scores_out.empty()) {
    throw EmptyInputError("optimal_threshold: both populations must be nonempty");
  }
  check_finite(raw.scores_in, "in");
  check_finite(raw.scores_out, "out");
  const ScoredPopulation pop = raw.normalized();

  std::vector<double> in_sorted = pop.scores_in;
  std::vector<double> out_sorted = pop.scores_out;
  std::sort(in_sorted.begin(), in_sorted.end());
  std::sort(out_sorted.begin(), out_sorted.end());

  std::vector<double> pooled;
  pooled.reserve(in_sorted.size() + out_sorted.size());
  pooled.insert(pooled.end(), in_sorted.begin(), in_sorted.end());
  pooled.insert(pooled.end(), out_sorted.begin(), out_sorted.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  // Candidate thresholds: midpoints between consecutive distinct pooled
  // scores plus sentinels beyond both ends. The empirical error is
  // piecewise constant with breakpoints at the scores, so these candidates
  // realize every attainable error value.
  std::vector<double> candidates;
  candidates.reserve(pooled.size() + 1);
  candidates.push_back(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i + 1 < pooled.size(); ++i) {
    candidates.push_back(0.5 * (pooled[i] + pooled[i + 1]));
  }
  candidates.push_back(std::numeric_limits<double>::infinity());

  const double n_in = static_cast<double>(in_sorted.size());
  const double n_out = static_cast<double>(out_sorted.size());
  const double p_in = n_in / (n_in + n_out);
  const double p_out = n_out / (n_in + n_out);

  ThresholdResult best;
  best.p_in = p_in;
  best.p_out = p_out;
  best.min_error = std::numeric_limits<double>::infinity();
  for (double tau : candidates) {
    // P(q(x_in) <= tau) and P(q(x_out) > tau), empirically.
    const double in_below =
        static_cast<double>(std::upper_bound(in_sorted.begin(), in_sorted.end(), tau) -
                            in_sorted.begin());
    const double out_above =
        n_out - static_cast<double>(std::upper_bound(out_sorted.begin(), out_sorted.end(),
                                                     tau) -
                                    out_sorted.begin());
    const double error = (in_below / n_in) * p_in + (out_above / n_out) * p_out;
    if (error < best.min_error) {  // strict: ties keep the smallest tau
      best.min_error = error;
      best.tau = tau;
    }
  }
  best.detection_accuracy = 1.0 - best.min_error;
  return best;
}

std::vector<PrPoint> pr_curve(const ScoredPopulation& raw, PositiveClass positive) {
  check_finite(raw.scores_in, "in");
  check_finite(raw.scores_out, "out");
  const ScoredPopulation pop = raw.normalized();

  // Work in an oriented space where high score predicts the positive
  // class: for positive == out_dist the roles swap and scores negate.
  std::vector<double> pos, neg;
  double sign = 1.0;
  if (positive == PositiveClass::in_dist) {
    pos = pop.scores_in;
    neg = pop.scores_out;
  } else {
    sign = -1.0;
    pos.reserve(pop.scores_out.size());
    neg.reserve(pop.scores_in.size());
    for (double s : pop.scores_out) pos.push_back(-s);
    for (double s : pop.scores_in) neg.push_back(-s);
  }
  if (pos.empty()) {
    throw EmptyInputError("pr_curve: positive population is empty");
  }

  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  std::vector<double> thresholds;
  thresholds.reserve(pos.size() + neg.size());
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(),
             std::back_inserter(thresholds), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<PrPoint> curve;
  const double n_pos = static_cast<double>(pos.size());
  std::size_t pi = 0, ni = 0;
  for (double tau : thresholds) {
    while (pi < pos.size() && pos[pi] >= tau) ++pi;
    while (ni < neg.size() && neg[ni] >= tau) ++ni;
    const double tp = static_cast<double>(pi);
    const double fp = static_cast<double>(ni);
    PrPoint point;
    point.threshold = sign * tau;
    point.recall = tp / n_pos;
    point.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    if (curve.empty() && point.recall > 0.0) {
      // Anchor the curve at recall 0; by the average-precision step rule
      // the anchor contributes no area.
      curve.push_back(PrPoint{sign * std::numeric_limits<double>::infinity(), 0.0, 1.0});
    }
    curve.push_back(point);
    if (pi == pos.size()) break;  // recall reached 1
  }
  return curve;
}

double aupr(const std::vector<PrPoint>& curve) {
  if (curve.empty()) throw EmptyInputError("aupr: empty curve");
  double area = 0.0;
  double prev_recall = 0.0;
  for (const PrPoint& p : curve) {
    area += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return area;
}

std::string pr_curve_csv(const std::vector<PrPoint>& curve) {
  std::ostringstream os;
  os << "threshold,recall,precision\n";
  char buf[120];
  for (const PrPoint& p : curve) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", p.threshold, p.recall, p.precision);
    os << buf;
  }
  return os.str();
}

}  // namespace oodkit
