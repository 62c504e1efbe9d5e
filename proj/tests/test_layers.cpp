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

#include "oodkit/model.hpp"
#include "oodkit/presets.hpp"
#include "test_util.hpp"

using namespace oodkit;
using namespace oodkit::testing;

TEST_CASE("xavier bounds hold for a 4->4 dense layer") {
  Rng rng(123);
  const auto spec = LayerSpec::make_dense(4, 4);
  const auto w = xavier_init<float>(spec, rng);
  REQUIRE(w.shape == Shape{4, 4});
  const double bound = std::sqrt(6.0 / 8.0);
  for (float v : w.data) {
    CHECK(v >= -bound);
    CHECK(v <= bound);
  }
}

TEST_CASE("xavier is deterministic per seed and rejects weightless layers") {
  Rng a(7), b(7);
  const auto spec = LayerSpec::make_conv2d(3, 8);
  const auto w1 = xavier_init<float>(spec, a);
  const auto w2 = xavier_init<float>(spec, b);
  CHECK(w1.data == w2.data);

  Rng c(7);
  CHECK_THROWS_AS(xavier_init<float>(LayerSpec::make_dropout(0.3), c), InvalidSpecError);
  CHECK_THROWS_AS(xavier_init<float>(LayerSpec::make_softmax(), c), InvalidSpecError);
}

TEST_CASE("built models have zero biases and the closed-form parameter count") {
  // First discriminator convolution at reference scale: 3 -> 64 maps,
  // 5x5 kernels: 5*5*3*64 + 64 = 4864 parameters.
  ModelSpec spec;
  spec.role = Role::dis;
  spec.input_shape = {32, 32, 3};
  spec.layers = {LayerSpec::make_conv2d(0, 64, 5, 2, 2), LayerSpec::make_leaky_relu(0.2),
                 LayerSpec::make_flatten(), LayerSpec::make_dense(1),
                 LayerSpec::make_sigmoid()};
  CHECK(layer_param_count(spec.layers[0], {32, 32, 3}) == 4864);

  Rng rng(1);
  const Model model = build_model(spec, rng);
  CHECK(model.param_count() == model_param_count(spec));
  for (float v : model.params[0][1].data) CHECK(v == 0.0f);  // conv bias
  for (float v : model.params[3][1].data) CHECK(v == 0.0f);  // dense bias
}

TEST_CASE("empty and incompatible specs are rejected with the layer index") {
  Rng rng(1);
  ModelSpec empty;
  empty.role = Role::dis;
  empty.input_shape = {4};
  CHECK_THROWS_AS(build_model(empty, rng), InvalidSpecError);

  ModelSpec bad;
  bad.role = Role::dis;
  bad.input_shape = {4};
  bad.layers = {LayerSpec::make_conv2d(0, 8)};  // conv on a vector input
  try {
    build_model(bad, rng);
    FAIL("expected InvalidSpecError");
  } catch (const InvalidSpecError& e) {
    CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
  }
}

TEST_CASE("classifier spec with n_classes=4 ends in width 4") {
  ArchConfig config;
  config.n_classes = 4;
  config.input_shape = {32, 32, 3};
  Rng rng(2);
  const Model model = build_model(make_classifier_spec(config), rng);
  CHECK(model.output_shape() == Shape{4});
}

TEST_CASE("dense layer with zero weights outputs the bias") {
  ModelSpec spec;
  spec.role = Role::dis;
  spec.input_shape = {3};
  spec.layers = {LayerSpec::make_dense(2), LayerSpec::make_dense(1),
                 LayerSpec::make_sigmoid()};
  Rng rng(3);
  Model model = build_model(spec, rng);
  for (auto& v : model.params[0][0].data) v = 0.0f;
  model.params[0][1].data = {0.25f, -1.5f};

  Tensor x(Shape{2, 3}, {0.1f, 0.9f, 0.4f, 0.0f, 0.2f, 0.8f});
  Rng fwd(0);
  const auto trace = forward(model, x, Mode::infer, fwd);
  const Tensor& dense_out = trace.acts[1];
  for (int b = 0; b < 2; ++b) {
    CHECK(dense_out.at(b, 0) == 0.25f);
    CHECK(dense_out.at(b, 1) == -1.5f);
  }
}

TEST_CASE("leaky relu applies the slope on the negative side") {
  ModelSpec spec;
  spec.role = Role::dis;
  spec.input_shape = {1};
  spec.layers = {LayerSpec::make_leaky_relu(0.2), LayerSpec::make_dense(1),
                 LayerSpec::make_sigmoid()};
  Rng rng(4);
  Model model = build_model(spec, rng);
  Tensor x(Shape{2, 1}, {-1.0f, 1.0f});
  Rng fwd(0);
  const auto trace = forward(model, x, Mode::infer, fwd);
  CHECK(trace.acts[1].at(0) == doctest::Approx(-0.2));
  CHECK(trace.acts[1].at(1) == doctest::Approx(1.0));
}

TEST_CASE("softmax of equal inputs is uniform and rows sum to one") {
  ModelSpec spec;
  spec.role = Role::cls;
  spec.n_classes = 2;
  spec.input_shape = {2};
  spec.layers = {LayerSpec::make_softmax()};
  Rng rng(5);
  Model model = build_model(spec, rng);
  Tensor x(Shape{1, 2}, {0.0f, 0.0f});
  Rng fwd(0);
  CHECK(forward(model, x, Mode::infer, fwd).output().at(0, 0) == doctest::Approx(0.5));

  // Random logits: strictly positive entries, unit row sums.
  Rng data_rng(6);
  Tensor logits(Shape{64, 2});
  for (auto& v : logits.data) v = static_cast<float>(10.0 * data_rng.normal());
  const Tensor probs = forward(model, logits, Mode::infer, fwd).output();
  for (int r = 0; r < 64; ++r) {
    const double sum = probs.at(r, 0) + probs.at(r, 1);
    CHECK(probs.at(r, 0) > 0.0f);
    CHECK(probs.at(r, 1) > 0.0f);
    CHECK(std::fabs(sum - 1.0) < 1e-6);
  }
}

TEST_CASE("dropout is identity in infer mode and mean-preserving in train mode") {
  ModelSpec spec;
  spec.role = Role::dis;
  spec.input_shape = {50};
  spec.layers = {LayerSpec::make_dropout(0.3), LayerSpec::make_dense(1),
                 LayerSpec::make_sigmoid()};
  Rng rng(6);
  Model model = build_model(spec, rng);

  Rng data_rng(7);
  Tensor x(Shape{40, 50});
  for (auto& v : x.data) v = static_cast<float>(data_rng.uniform(0.5, 1.0));

  Rng fwd(0);
  const auto infer_trace = forward(model, x, Mode::infer, fwd);
  CHECK(infer_trace.acts[1].data == x.data);

  // Inverted dropout: E[mask * x] = x. At rate 0.3 over 2000 entries the
  // sample mean of the kept/scaled activations stays within a few percent.
  Rng train_rng(42);
  const auto train_trace = forward(model, x, Mode::train, train_rng);
  double sum_in = 0.0, sum_out = 0.0;
  int zeros = 0;
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    sum_in += x.at(i);
    sum_out += train_trace.acts[1].at(i);
    if (train_trace.acts[1].at(i) == 0.0f) ++zeros;
  }
  CHECK(std::fabs(sum_out / sum_in - 1.0) < 0.05);
  CHECK(zeros > 0.2 * x.numel());
  CHECK(zeros < 0.4 * x.numel());

  // mc_dropout mode also draws masks.
  Rng mc_rng(42);
  const auto mc_trace = forward(model, x, Mode::mc_dropout, mc_rng);
  CHECK(mc_trace.acts[1].data == train_trace.acts[1].data);
}

TEST_CASE("batchnorm normalizes batch statistics in train mode") {
  ModelSpec spec;
  spec.role = Role::dis;
  spec.input_shape = {3};
  spec.layers = {LayerSpec::make_batchnorm(), LayerSpec::make_dense(1),
                 LayerSpec::make_sigmoid()};
  Rng rng(8);
  Model model = build_model(spec, rng);

  Rng data_rng(9);
  Tensor x(Shape{64, 3});
  for (auto& v : x.data) v = static_cast<float>(3.0 + data_rng.normal());
  Rng fwd(0);
  const auto trace = forward(model, x, Mode::train, fwd);
  const Tensor& y = trace.acts[1];
  for (int f = 0; f < 3; ++f) {
    double mean = 0.0, var = 0.0;
    for (int b = 0; b < 64; ++b) mean += y.at(b, f);
    mean /= 64;
    for (int b = 0; b < 64; ++b) var += (y.at(b, f) - mean) * (y.at(b, f) - mean);
    var /= 64;
    CHECK(std::fabs(mean) < 1e-5);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
  }

  // Running averages moved toward the batch statistics.
  CHECK(model.buffers[0][0].at(0) != 0.0f);
  CHECK(model.buffers[0][1].at(0) != 1.0f);

  // Inference uses the stored running statistics, not batch ones.
  Rng fwd2(0);
  const auto infer_trace = forward(model, x, Mode::infer, fwd2);
  CHECK(infer_trace.acts[1].data != trace.acts[1].data);
}

TEST_CASE("forward rejects shape mismatches and const train forwards") {
  ArchConfig config;
  config.input_shape = {16, 16, 3};
  config.n_classes = 4;
  Rng rng(10);
  Model model = build_model(make_classifier_spec(config), rng);
  Tensor bad(Shape{2, 8, 8, 3});
  Rng fwd(0);
  CHECK_THROWS_AS(forward(model, bad, Mode::infer, fwd), DimensionError);

  const Model& frozen = model;
  Tensor ok(Shape{1, 16, 16, 3});
  CHECK_THROWS_AS(forward(frozen, ok, Mode::train, fwd), StateError);
  CHECK_NOTHROW(forward(frozen, ok, Mode::infer, fwd));
}

TEST_CASE("generator preset doubles spatial extent through each tconv block") {
  ArchConfig config;
  config.input_shape = {32, 32, 3};
  config.n_classes = 4;
  Rng rng(11);
  const Model gen = build_model(make_generator_spec(config), rng);
  CHECK(gen.output_shape() == Shape{32, 32, 3});
  Rng noise_rng(12);
  const Tensor noise = sample_noise(config.noise_dim, 2, noise_rng);
  Rng fwd(0);
  Model mutable_gen = gen;
  const auto trace = forward(mutable_gen, noise, Mode::train, fwd);
  CHECK(trace.output().shape == Shape{2, 32, 32, 3});
  for (float v : trace.output().data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}
