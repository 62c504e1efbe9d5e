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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oodkit/optim.hpp"

using namespace oodkit;

TEST_CASE("adam: zero gradient leaves parameters unchanged and increments t") {
  Tensor p(Shape{3}, {1.0f, -2.0f, 0.5f});
  Tensor g(Shape{3}, 0.0f);
  auto state = AdamState::for_params({&p});
  adam_step<float>({&p}, {&g}, state, 1e-3);
  CHECK(p.data == std::vector<float>{1.0f, -2.0f, 0.5f});
  CHECK(state.t == 1);
}

TEST_CASE("adam: first step moves by about -lr * sign(g)") {
  // With bias correction, m_hat = g and v_hat = g^2 on the first step, so
  // the update is -lr * g / (|g| + eps) = -lr * sign(g) up to eps.
  for (double g0 : {0.3, -1.7, 42.0}) {
    Tensor p(Shape{1}, {1.0f});
    Tensor g(Shape{1}, {static_cast<float>(g0)});
    auto state = AdamState::for_params({&p});
    const double lr = 1e-2;
    adam_step<float>({&p}, {&g}, state, lr);
    const double expected = 1.0 - lr * (g0 > 0 ? 1.0 : -1.0);
    CHECK(p.at(0) == doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("adam: identical state and inputs give bitwise-identical results") {
  Tensor p1(Shape{4}, {0.1f, 0.2f, 0.3f, 0.4f});
  Tensor p2 = p1;
  Tensor g(Shape{4}, {0.5f, -0.25f, 0.0f, 1.5f});
  auto s1 = AdamState::for_params({&p1});
  auto s2 = AdamState::for_params({&p2});
  for (int i = 0; i < 10; ++i) {
    adam_step<float>({&p1}, {&g}, s1, 3e-4);
    adam_step<float>({&p2}, {&g}, s2, 3e-4);
  }
  CHECK(p1.data == p2.data);
  CHECK(s1.m[0].data == s2.m[0].data);
  CHECK(s1.v[0].data == s2.v[0].data);
}

TEST_CASE("adam rejects mismatched shapes and non-positive rates") {
  Tensor p(Shape{2}, {1.0f, 2.0f});
  Tensor g(Shape{3}, 0.0f);
  auto state = AdamState::for_params({&p});
  CHECK_THROWS_AS(adam_step<float>({&p}, {&g}, state, 1e-3), DimensionError);
  Tensor g2(Shape{2}, 0.0f);
  CHECK_THROWS_AS(adam_step<float>({&p}, {&g2}, state, 0.0), InvalidSpecError);
}

TEST_CASE("lr_at implements the staircase decay") {
  TrainSchedule sched;  // lr0 2e-4, halved every 30000
  CHECK(lr_at(0, sched) == doctest::Approx(2e-4));
  CHECK(lr_at(29999, sched) == doctest::Approx(2e-4));
  CHECK(lr_at(30000, sched) == doctest::Approx(1e-4));
  CHECK(lr_at(60000, sched) == doctest::Approx(5e-5));
}

TEST_CASE("schedule validation rejects bad hyperparameters") {
  TrainSchedule sched;
  sched.lr0 = 0.0;
  CHECK_THROWS_AS(sched.validate(), InvalidSpecError);
  sched = TrainSchedule{};
  sched.decay_rate = 1.5;
  CHECK_THROWS_AS(sched.validate(), InvalidSpecError);
  sched = TrainSchedule{};
  sched.decay_every = 0;
  CHECK_THROWS_AS(sched.validate(), InvalidSpecError);
}

TEST_CASE("sample_noise: default dimension, moments, determinism") {
  CHECK(kDefaultNoiseDim == 100);
  Rng rng(42);
  const Tensor noise = sample_noise(kDefaultNoiseDim, 1000, rng);
  REQUIRE(noise.shape == Shape{1000, 100});

  double mean = 0.0;
  for (float v : noise.data) mean += v;
  mean /= static_cast<double>(noise.numel());
  double var = 0.0;
  for (float v : noise.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(noise.numel());
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.05);

  Rng rng2(42);
  const Tensor again = sample_noise(kDefaultNoiseDim, 1000, rng2);
  CHECK(noise.data == again.data);

  CHECK_THROWS_AS(sample_noise(0, 1, rng), InvalidSpecError);
}
