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

#ifndef OODKIT_TESTS_TEST_UTIL_HPP_
#define OODKIT_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <functional>
#include <vector>

#include "oodkit/model.hpp"
#include "oodkit/rng.hpp"
#include "oodkit/tensor.hpp"

namespace oodkit::testing {

// Central finite differences, the independent oracle every analytic
// gradient is checked against. h = 1e-3; the checks run on the double
// instantiation of the engine so the difference quotient sits far above
// the arithmetic noise floor.
constexpr double kFdStep = 1e-3;
constexpr double kGradRelTol = 1e-4;

// Relative error with a small-magnitude guard: entries below 1e-2 in both
// oracle and analytic value are compared at absolute tolerance 1e-6.
inline bool grad_close(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-2});
  return std::fabs(analytic - numeric) / denom <= kGradRelTol;
}

// d loss / d value[i] by central differences for chosen probe indices.
inline std::vector<double> numeric_grad(std::vector<double*> probes,
                                        const std::function<double()>& loss) {
  std::vector<double> grads;
  grads.reserve(probes.size());
  for (double* p : probes) {
    const double saved = *p;
    *p = saved + kFdStep;
    const double up = loss();
    *p = saved - kFdStep;
    const double down = loss();
    *p = saved;
    grads.push_back((up - down) / (2.0 * kFdStep));
  }
  return grads;
}

// Picks up to n probe indices spread across a tensor, deterministic per rng.
inline std::vector<std::int64_t> probe_indices(const TensorT<double>& t, int n, Rng& rng) {
  std::vector<std::int64_t> idx;
  if (t.numel() <= n) {
    for (std::int64_t i = 0; i < t.numel(); ++i) idx.push_back(i);
    return idx;
  }
  for (int i = 0; i < n; ++i) {
    idx.push_back(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(t.numel()))));
  }
  return idx;
}

inline TensorT<double> random_tensor(const Shape& shape, Rng& rng, double scale = 1.0) {
  TensorT<double> t(shape);
  for (auto& v : t.data) v = scale * rng.normal();
  return t;
}

inline TensorT<double> random_unit_tensor(const Shape& shape, Rng& rng) {
  TensorT<double> t(shape);
  for (auto& v : t.data) v = rng.uniform();
  return t;
}

}  // namespace oodkit::testing

#endif  // OODKIT_TESTS_TEST_UTIL_HPP_
