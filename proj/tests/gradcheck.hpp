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

#ifndef OODKIT_TESTS_GRADCHECK_HPP_
#define OODKIT_TESTS_GRADCHECK_HPP_

#include <sstream>
#include <string>
#include <vector>

#include "oodkit/losses.hpp"
#include "oodkit/model.hpp"
#include "oodkit/optim.hpp"
#include "oodkit/presets.hpp"
#include "oodkit/training.hpp"
#include "test_util.hpp"

namespace oodkit::testing {

using DModel = ModelT<double>;
using DTensor = TensorT<double>;

// Compares backward() against central finite differences of the projection
// loss L = sum(C * output) for every parameter (probed) and the input.
// Returns human-readable failure descriptions; empty means pass.
inline std::vector<std::string> check_model_gradients(DModel& model, DTensor input,
                                                      std::uint64_t seed,
                                                      int probes_per_tensor = 5) {
  std::vector<std::string> failures;
  Rng setup_rng(seed ^ 0xC0FFEE);
  Shape out_shape = model.output_shape();
  out_shape.insert(out_shape.begin(), input.dim(0));
  const DTensor projection = random_tensor(out_shape, setup_rng);

  const auto loss = [&]() {
    Rng mask_rng(seed);  // identical dropout masks for every evaluation
    const auto trace = forward(model, input, Mode::train, mask_rng);
    double sum = 0.0;
    for (std::int64_t i = 0; i < projection.numel(); ++i) {
      sum += projection.at(i) * trace.output().at(i);
    }
    return sum;
  };

  Rng mask_rng(seed);
  const auto trace = forward(model, input, Mode::train, mask_rng);
  const GradsT<double> grads = backward(model, trace, projection);

  Rng probe_rng(seed ^ 0xBEEF);
  for (std::size_t li = 0; li < model.params.size(); ++li) {
    for (std::size_t pi = 0; pi < model.params[li].size(); ++pi) {
      DTensor& param = model.params[li][pi];
      const auto idx = probe_indices(param, probes_per_tensor, probe_rng);
      std::vector<double*> probes;
      for (std::int64_t i : idx) probes.push_back(&param.at(i));
      const auto numeric = numeric_grad(probes, loss);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double analytic = grads.params[li][pi].at(idx[k]);
        if (!grad_close(analytic, numeric[k])) {
          std::ostringstream os;
          os << layer_kind_name(model.plans[li].spec.kind) << " layer " << li << " param "
             << pi << " [" << idx[k] << "]: analytic " << analytic << " vs fd "
             << numeric[k];
          failures.push_back(os.str());
        }
      }
    }
  }

  // Input gradient (the path GAN updates flow through).
  const auto idx = probe_indices(input, probes_per_tensor, probe_rng);
  std::vector<double*> probes;
  for (std::int64_t i : idx) probes.push_back(&input.at(i));
  const auto numeric = numeric_grad(probes, loss);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double analytic = grads.input.at(idx[k]);
    if (!grad_close(analytic, numeric[k])) {
      std::ostringstream os;
      os << "input grad [" << idx[k] << "]: analytic " << analytic << " vs fd "
         << numeric[k];
      failures.push_back(os.str());
    }
  }
  return failures;
}

// One small train-mode model per layer kind, each embedded in a valid
// role-tagged network.
inline std::vector<std::string> check_layer_kind_gradients(std::uint64_t seed) {
  std::vector<std::string> failures;
  Rng rng(seed);
  const auto run = [&](const char* what, const ModelSpec& spec, const Shape& batch_shape) {
    DModel model = build_model_t<double>(spec, rng);
    DTensor input = random_unit_tensor(batch_shape, rng);
    for (std::string& f : check_model_gradients(model, std::move(input), seed)) {
      failures.push_back(std::string(what) + ": " + f);
    }
  };

  {
    ModelSpec spec;
    spec.role = Role::dis;
    spec.input_shape = {5};
    spec.layers = {LayerSpec::make_dense(4), LayerSpec::make_leaky_relu(0.2),
                   LayerSpec::make_dense(1), LayerSpec::make_sigmoid()};
    run("dense+leaky_relu+sigmoid", spec, {6, 5});
  }
  {
    ModelSpec spec;
    spec.role = Role::dis;
    spec.input_shape = {6, 6, 2};
    spec.layers = {LayerSpec::make_conv2d(0, 3, 3, 2, 1), LayerSpec::make_leaky_relu(0.2),
                   LayerSpec::make_flatten(), LayerSpec::make_dense(1),
                   LayerSpec::make_sigmoid()};
    run("conv2d+flatten", spec, {4, 6, 6, 2});
  }
  {
    ModelSpec spec;
    spec.role = Role::dis;
    spec.input_shape = {3, 3, 2};
    spec.layers = {LayerSpec::make_tconv2d(2, 3, 3, 2, 1, 1), LayerSpec::make_flatten(),
                   LayerSpec::make_dense(1), LayerSpec::make_sigmoid()};
    run("tconv2d", spec, {4, 3, 3, 2});
  }
  {
    ModelSpec spec;
    spec.role = Role::dis;
    spec.input_shape = {4};
    spec.layers = {LayerSpec::make_batchnorm(), LayerSpec::make_dense(1),
                   LayerSpec::make_sigmoid()};
    run("batchnorm(vector)", spec, {6, 4});
  }
  {
    ModelSpec spec;
    spec.role = Role::dis;
    spec.input_shape = {4, 4, 2};
    spec.layers = {LayerSpec::make_conv2d(0, 2, 3, 1, 1), LayerSpec::make_batchnorm(),
                   LayerSpec::make_leaky_relu(0.2), LayerSpec::make_flatten(),
                   LayerSpec::make_dense(1), LayerSpec::make_sigmoid()};
    run("batchnorm(conv)", spec, {3, 4, 4, 2});
  }
  {
    ModelSpec spec;
    spec.role = Role::dis;
    spec.input_shape = {6};
    spec.layers = {LayerSpec::make_dense(5), LayerSpec::make_dropout(0.4),
                   LayerSpec::make_dense(1), LayerSpec::make_sigmoid()};
    run("dropout", spec, {5, 6});
  }
  {
    ModelSpec spec;
    spec.role = Role::cls;
    spec.n_classes = 3;
    spec.input_shape = {4};
    spec.layers = {LayerSpec::make_dense(3), LayerSpec::make_softmax()};
    run("softmax", spec, {5, 4});
  }
  return failures;
}

struct TinyJointSetup {
  ModelSpec cls, gen, dis;
  int n_classes = 3;
  int noise_dim = 4;
  Shape data_shape = {6};  // per-sample
};

inline TinyJointSetup tiny_joint_setup() {
  TinyJointSetup setup;
  ArchConfig config;
  config.n_classes = setup.n_classes;
  config.input_shape = setup.data_shape;
  config.noise_dim = setup.noise_dim;
  config.mlp_hidden = {5};
  setup.cls = make_classifier_spec(config);
  setup.gen = make_generator_spec(config);
  setup.dis = make_discriminator_spec(config);
  return setup;
}

// Finite-difference check of the three composite losses (discriminator,
// generator, classifier) against the gradients the training loop steps on.
inline std::vector<std::string> check_composite_loss_gradients(std::uint64_t seed) {
  std::vector<std::string> failures;
  const TinyJointSetup setup = tiny_joint_setup();
  Rng rng(seed);
  DModel cls = build_model_t<double>(setup.cls, rng);
  DModel gen = build_model_t<double>(setup.gen, rng);
  DModel dis = build_model_t<double>(setup.dis, rng);

  const int batch = 5;
  DTensor real = random_unit_tensor({batch, setup.data_shape[0]}, rng);
  std::vector<int> labels;
  for (int i = 0; i < batch; ++i) {
    labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(setup.n_classes))));
  }
  Rng noise_rng(seed ^ 0x11);
  const DTensor noise = sample_noise_t<double>(setup.noise_dim, batch, noise_rng);

  struct Case {
    const char* name;
    DModel* target;
    std::function<double(GradsT<double>*)> eval;
  };
  const std::vector<Case> cases = {
      {"loss_d", &dis,
       [&](GradsT<double>* g) {
         Rng r(seed);
         return eval_loss_d(dis, gen, real, noise, r, g);
       }},
      {"loss_g", &gen,
       [&](GradsT<double>* g) {
         Rng r(seed);
         return eval_loss_g(gen, dis, cls, noise, setup.n_classes, r, g);
       }},
      {"loss_cls", &cls,
       [&](GradsT<double>* g) {
         Rng r(seed);
         return eval_loss_cls(cls, gen, real, labels, noise, setup.n_classes, r, g);
       }},
  };

  Rng probe_rng(seed ^ 0x77);
  for (const Case& c : cases) {
    GradsT<double> grads;
    c.eval(&grads);
    for (std::size_t li = 0; li < c.target->params.size(); ++li) {
      for (std::size_t pi = 0; pi < c.target->params[li].size(); ++pi) {
        DTensor& param = c.target->params[li][pi];
        const auto idx = probe_indices(param, 5, probe_rng);
        std::vector<double*> probes;
        for (std::int64_t i : idx) probes.push_back(&param.at(i));
        const auto numeric = numeric_grad(probes, [&]() { return c.eval(nullptr); });
        for (std::size_t k = 0; k < idx.size(); ++k) {
          const double analytic = grads.params[li][pi].at(idx[k]);
          if (!grad_close(analytic, numeric[k])) {
            std::ostringstream os;
            os << c.name << " wrt "
               << layer_kind_name(c.target->plans[li].spec.kind) << " layer " << li
               << " param " << pi << " [" << idx[k] << "]: analytic " << analytic
               << " vs fd " << numeric[k];
            failures.push_back(os.str());
          }
        }
      }
    }
  }
  return failures;
}

}  // namespace oodkit::testing

#endif  // OODKIT_TESTS_GRADCHECK_HPP_
