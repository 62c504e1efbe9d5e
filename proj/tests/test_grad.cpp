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

#include "gradcheck.hpp"

using namespace oodkit;
using namespace oodkit::testing;

TEST_CASE("every layer kind matches central finite differences") {
  for (std::uint64_t seed : {11u, 29u, 47u}) {
    const auto failures = check_layer_kind_gradients(seed);
    for (const std::string& f : failures) MESSAGE(f);
    CHECK(failures.empty());
  }
}

TEST_CASE("composite losses match finite differences on tiny models") {
  for (std::uint64_t seed : {5u, 91u}) {
    const auto failures = check_composite_loss_gradients(seed);
    for (const std::string& f : failures) MESSAGE(f);
    CHECK(failures.empty());
  }
}

TEST_CASE("dense weight gradient is the outer product g x^T") {
  // Single dense layer, batch of one: dW[o][i] = g[o] * x[i].
  ModelSpec spec;
  spec.role = Role::cls;
  spec.n_classes = 2;
  spec.input_shape = {2};
  spec.layers = {LayerSpec::make_dense(2), LayerSpec::make_softmax()};
  Rng rng(3);
  auto model = build_model_t<double>(spec, rng);

  TensorT<double> x(Shape{1, 2}, {0.7, -1.3});
  Rng fwd_rng(0);
  const auto trace = forward(model, x, Mode::train, fwd_rng);

  // Push the upstream gradient straight into the dense layer by inverting
  // the softmax backward map: feeding C through softmax backward yields
  // y*(C - y.C); instead check against a model without softmax influence by
  // differencing the analytic dense grad with the chain value.
  TensorT<double> upstream(Shape{1, 2}, {0.4, -0.9});
  const auto grads = backward(model, trace, upstream);

  // Expected dense gradient: softmax backward of upstream, then outer
  // product with x.
  const auto& y = trace.output();
  const double dot = upstream.at(0, 0) * y.at(0, 0) + upstream.at(0, 1) * y.at(0, 1);
  const double g0 = y.at(0, 0) * (upstream.at(0, 0) - dot);
  const double g1 = y.at(0, 1) * (upstream.at(0, 1) - dot);
  CHECK(grads.params[0][0].at(0, 0) == doctest::Approx(g0 * 0.7).epsilon(1e-12));
  CHECK(grads.params[0][0].at(0, 1) == doctest::Approx(g0 * -1.3).epsilon(1e-12));
  CHECK(grads.params[0][0].at(1, 0) == doctest::Approx(g1 * 0.7).epsilon(1e-12));
  CHECK(grads.params[0][0].at(1, 1) == doctest::Approx(g1 * -1.3).epsilon(1e-12));
  CHECK(grads.params[0][1].at(0) == doctest::Approx(g0).epsilon(1e-12));
  CHECK(grads.params[0][1].at(1) == doctest::Approx(g1).epsilon(1e-12));
}

TEST_CASE("plain dense layer gradient equals g x^T without activation") {
  // Discriminator-shaped stack where the first layer output feeds a frozen
  // identity-ish path: checked via finite differences elsewhere; here the
  // closed form on a 2x2 instance using a linear projection loss.
  ModelSpec spec;
  spec.role = Role::dis;
  spec.input_shape = {2};
  spec.layers = {LayerSpec::make_dense(2), LayerSpec::make_dense(1),
                 LayerSpec::make_sigmoid()};
  Rng rng(7);
  auto model = build_model_t<double>(spec, rng);
  // Make the tail transparent: second dense = identity row, zero bias.
  model.params[1][0].at(0) = 1.0;
  model.params[1][0].at(1) = 0.0;
  model.params[1][1].at(0) = 0.0;

  TensorT<double> x(Shape{1, 2}, {2.0, 3.0});
  Rng fwd_rng(0);
  const auto trace = forward(model, x, Mode::train, fwd_rng);
  TensorT<double> upstream(Shape{1, 1}, {1.0});
  const auto grads = backward(model, trace, upstream);

  // Chain: d sigmoid = y(1-y); upstream to dense0 row0 = s' * w10 = s'.
  const double y = trace.output().at(0);
  const double sprime = y * (1.0 - y);
  CHECK(grads.params[0][0].at(0, 0) == doctest::Approx(sprime * 2.0).epsilon(1e-9));
  CHECK(grads.params[0][0].at(0, 1) == doctest::Approx(sprime * 3.0).epsilon(1e-9));
  CHECK(grads.params[0][0].at(1, 0) == doctest::Approx(0.0));
  CHECK(grads.params[0][0].at(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("zero output gradient produces all-zero gradients") {
  ModelSpec spec;
  spec.role = Role::dis;
  spec.input_shape = {4, 4, 2};
  spec.layers = {LayerSpec::make_conv2d(0, 3, 3, 1, 1), LayerSpec::make_leaky_relu(0.2),
                 LayerSpec::make_flatten(), LayerSpec::make_dense(1),
                 LayerSpec::make_sigmoid()};
  Rng rng(5);
  auto model = build_model_t<double>(spec, rng);
  Rng data_rng(6);
  const auto input = random_unit_tensor({2, 4, 4, 2}, data_rng);
  Rng fwd_rng(0);
  const auto trace = forward(model, input, Mode::train, fwd_rng);
  TensorT<double> zero(trace.output().shape, 0.0);
  const auto grads = backward(model, trace, zero);
  for (const auto& layer : grads.params) {
    for (const auto& g : layer) {
      for (double v : g.data) CHECK(v == 0.0);
    }
  }
  for (double v : grads.input.data) CHECK(v == 0.0);
}

TEST_CASE("backward rejects non-train traces") {
  ModelSpec spec;
  spec.role = Role::cls;
  spec.n_classes = 2;
  spec.input_shape = {3};
  spec.layers = {LayerSpec::make_dense(2), LayerSpec::make_softmax()};
  Rng rng(9);
  auto model = build_model_t<double>(spec, rng);
  Rng data_rng(1);
  const auto input = random_unit_tensor({2, 3}, data_rng);
  Rng fwd_rng(0);
  const auto trace = forward(model, input, Mode::infer, fwd_rng);
  TensorT<double> g(trace.output().shape, 1.0);
  CHECK_THROWS_AS(backward(model, trace, g), StateError);
}
