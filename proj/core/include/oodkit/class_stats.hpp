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

#ifndef OODKIT_CLASS_STATS_HPP_
#define OODKIT_CLASS_STATS_HPP_

#include <string>
#include <vector>

#include "oodkit/tensor.hpp"

namespace oodkit {

// Gaussian fitted to one class: maximum-likelihood mean and biased (1/N)
// covariance over that class's logit vectors, plus the Cholesky factor of
// the shrunk covariance (cov + epsilon I) used for Mahalanobis distances.
struct ClassGaussian {
  int count = 0;
  std::vector<double> mean;  // k
  std::vector<double> cov;   // k x k, row-major
  std::vector<double> chol;  // k x k lower-triangular factor of cov + eps I
};

// Class-conditioned Gaussians over classifier logits ("bottleneck
// vectors"); one entry per class. Immutable after fitting.
struct ClassConditionalStats {
  int dof = 0;  // logit dimension k (= class count for logit features)
  double epsilon = 0.0;
  std::vector<ClassGaussian> classes;

  int n_classes() const { return static_cast<int>(classes.size()); }
};

// Sentinel: pick epsilon = 1e-5 * max_c trace(cov_c)/k at fit time.
constexpr double kAutoEpsilon = -1.0;

// Fits per-class mean and biased covariance on (n, k) logit rows. Every
// class in [0, n_classes) needs at least two samples. epsilon >= 0 is used
// as given; kAutoEpsilon derives it from the covariance scale.
ClassConditionalStats fit_class_stats(const std::vector<double>& logits, int n, int k,
                                      const std::vector<int>& labels, int n_classes,
                                      double epsilon = kAutoEpsilon);

// Same, starting from a float logit matrix (the classifier's output path).
ClassConditionalStats fit_class_stats(const Tensor& logits, const std::vector<int>& labels,
                                      int n_classes, double epsilon = kAutoEpsilon);

// Mahalanobis distance sqrt((x - mu_c)^T (cov_c + eps I)^-1 (x - mu_c)).
double mahalanobis(const std::vector<double>& x, const ClassConditionalStats& stats,
                   int class_id);

// Structured-text persistence: {"<class_id>": {"mean": [...], "cov": [...]},
// ..., "dof": k, "epsilon": e} with numbers at 9 significant digits.
std::string class_stats_to_text(const ClassConditionalStats& stats);
ClassConditionalStats class_stats_from_text(const std::string& text);
void save_class_stats(const ClassConditionalStats& stats, const std::string& path);
ClassConditionalStats load_class_stats(const std::string& path);

namespace detail {
// Lower Cholesky factor of a symmetric positive-definite k x k matrix.
// Throws NumericalError when a pivot is not positive.
std::vector<double> cholesky(const std::vector<double>& matrix, int k);
}  // namespace detail

}  // namespace oodkit

#endif  // OODKIT_CLASS_STATS_HPP_
