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

#ifndef OODKIT_OPTIM_HPP_
#define OODKIT_OPTIM_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "oodkit/errors.hpp"
#include "oodkit/rng.hpp"
#include "oodkit/tensor.hpp"

namespace oodkit {

// Training hyperparameters. Defaults follow the reference training recipe:
// initial rate 2e-4 halved every 30000 iterations, batches of 128.
struct TrainSchedule {
  double lr0 = 2e-4;
  std::uint64_t decay_every = 30000;
  double decay_rate = 0.5;
  int epochs = 100;
  int batch_size = 128;

  void validate() const {
    if (!(lr0 > 0.0)) throw InvalidSpecError("schedule: lr0 must be positive");
    if (!(decay_rate > 0.0 && decay_rate <= 1.0)) {
      throw InvalidSpecError("schedule: decay_rate must be in (0, 1]");
    }
    if (decay_every < 1) throw InvalidSpecError("schedule: decay_every must be >= 1");
    if (epochs < 0) throw InvalidSpecError("schedule: epochs must be non-negative");
    if (batch_size < 1) throw InvalidSpecError("schedule: batch_size must be >= 1");
  }
};

// Staircase exponential decay: lr0 * rate^floor(iteration / every).
inline double lr_at(std::uint64_t iteration, const TrainSchedule& sched) {
  const std::uint64_t steps = iteration / sched.decay_every;
  return sched.lr0 * std::pow(sched.decay_rate, static_cast<double>(steps));
}

// Adam moment buffers for one parameter set (one per model).
template <typename T>
struct AdamStateT {
  std::vector<TensorT<T>> m;
  std::vector<TensorT<T>> v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  static AdamStateT for_params(const std::vector<TensorT<T>*>& params) {
    AdamStateT s;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const TensorT<T>* p : params) {
      s.m.emplace_back(p->shape, T(0));
      s.v.emplace_back(p->shape, T(0));
    }
    return s;
  }
};

using AdamState = AdamStateT<float>;

// One Adam update with bias correction. Mutates params and state; grads are
// read-only. The moment/parameter arithmetic runs in double and is stored
// back in T.
template <typename T>
void adam_step(const std::vector<TensorT<T>*>& params,
               const std::vector<const TensorT<T>*>& grads, AdamStateT<T>& state,
               double lr) {
  if (!(lr > 0.0)) throw InvalidSpecError("adam_step: lr must be positive");
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw DimensionError("adam_step: parameter/gradient/state arity mismatch");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    TensorT<T>& p = *params[k];
    const TensorT<T>& g = *grads[k];
    check_same_shape(p, g, "adam_step");
    check_same_shape(p, state.m[k], "adam_step state");
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const double gv = g.data[i];
      const double m = state.beta1 * state.m[k].data[i] + (1.0 - state.beta1) * gv;
      const double v = state.beta2 * state.v[k].data[i] + (1.0 - state.beta2) * gv * gv;
      state.m[k].data[i] = static_cast<T>(m);
      state.v[k].data[i] = static_cast<T>(v);
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      p.data[i] = static_cast<T>(p.data[i] - lr * m_hat / (std::sqrt(v_hat) + state.eps_hat));
    }
  }
}

// Batch of i.i.d. standard normal noise vectors, shape (batch, dim).
// dim defaults to the 100-dimensional generator input.
template <typename T>
TensorT<T> sample_noise_t(int dim, int batch, Rng& rng) {
  if (dim < 1 || batch < 1) {
    throw InvalidSpecError("sample_noise: dim and batch must be >= 1");
  }
  TensorT<T> out(Shape{batch, dim});
  for (auto& v : out.data) v = static_cast<T>(rng.normal());
  return out;
}

inline Tensor sample_noise(int dim, int batch, Rng& rng) {
  return sample_noise_t<float>(dim, batch, rng);
}

constexpr int kDefaultNoiseDim = 100;

}  // namespace oodkit

#endif  // OODKIT_OPTIM_HPP_
