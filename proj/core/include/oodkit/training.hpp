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

#ifndef OODKIT_TRAINING_HPP_
#define OODKIT_TRAINING_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oodkit/losses.hpp"
#include "oodkit/model.hpp"
#include "oodkit/optim.hpp"

namespace oodkit {

enum class Origin { in_dist, out_dist, generated };

// A set of samples with class labels. `inputs` is (n, ...) with values in
// [0, 1]; labels index classes of the in-distribution task.
struct LabeledBatch {
  Tensor inputs;
  std::vector<int> labels;
  Origin origin = Origin::in_dist;

  int size() const { return inputs.dim(0); }
};

// Throws unless values lie in [0,1] and labels are within [0, n_classes).
void validate_labeled_batch(const LabeledBatch& batch, int n_classes);

enum class TrainMode { ce, joint };

const char* train_mode_name(TrainMode mode);
TrainMode train_mode_from_name(const std::string& name);

struct LossRow {
  std::uint64_t iteration = 0;
  double lr = 0.0;
  double l_d = 0.0;
  double l_g = 0.0;
  double l_cls = 0.0;  // cross-entropy in ce mode
};

// ---------------------------------------------------------------------------
// Composite losses with end-to-end gradients. These are the exact functions
// the training loop steps on; the gradient test suite calls them on a
// double-precision instantiation and compares against finite differences.
//
// Every function evaluates gen(noise) with the generator's current weights.
// Dropout masks are drawn from `rng` in call order, so two calls from an
// identical rng state produce identical values.

namespace detail {

template <typename T>
std::vector<TensorT<T>*> param_ptrs(ModelT<T>& model) {
  std::vector<TensorT<T>*> out;
  for (auto& layer : model.params)
    for (auto& t : layer) out.push_back(&t);
  return out;
}

template <typename T>
std::vector<const TensorT<T>*> grad_ptrs(const GradsT<T>& grads) {
  std::vector<const TensorT<T>*> out;
  for (const auto& layer : grads.params)
    for (const auto& t : layer) out.push_back(&t);
  return out;
}

template <typename T>
void add_param_grads(GradsT<T>& into, const GradsT<T>& other) {
  for (std::size_t i = 0; i < into.params.size(); ++i) {
    for (std::size_t j = 0; j < into.params[i].size(); ++j) {
      auto& a = into.params[i][j];
      const auto& b = other.params[i][j];
      for (std::size_t k = 0; k < a.data.size(); ++k) a.data[k] += b.data[k];
    }
  }
}

template <typename T>
void add_tensors(TensorT<T>& into, const TensorT<T>& other) {
  for (std::size_t k = 0; k < into.data.size(); ++k) into.data[k] += other.data[k];
}

}  // namespace detail

// Discriminator loss L_d = BCE(dis(real), 1) + BCE(dis(gen(n)), 0).
// Gradients (optional) are with respect to the discriminator parameters.
template <typename T>
double eval_loss_d(ModelT<T>& dis, ModelT<T>& gen, const TensorT<T>& real,
                   const TensorT<T>& noise, Rng& rng, GradsT<T>* dis_grads) {
  auto gen_trace = forward(gen, noise, Mode::train, rng);
  const TensorT<T>& fake = gen_trace.output();
  auto real_trace = forward(dis, real, Mode::train, rng);
  auto fake_trace = forward(dis, fake, Mode::train, rng);
  const double value =
      bce(real_trace.output(), const_target(real_trace.output(), 1.0)) +
      bce(fake_trace.output(), const_target(fake_trace.output(), 0.0));
  if (dis_grads) {
    auto g_real = backward(dis, real_trace,
                           bce_grad(real_trace.output(), const_target(real_trace.output(), 1.0)));
    auto g_fake = backward(dis, fake_trace,
                           bce_grad(fake_trace.output(), const_target(fake_trace.output(), 0.0)));
    detail::add_param_grads(g_real, g_fake);
    *dis_grads = std::move(g_real);
  }
  return value;
}

// Generator loss L_g = BCE(dis(gen(n)), 1) + KL(cls(gen(n)) || uniform).
// Gradients flow through the discriminator and classifier into the
// generator; only the generator parameter gradients are reported.
template <typename T>
double eval_loss_g(ModelT<T>& gen, ModelT<T>& dis, ModelT<T>& cls,
                   const TensorT<T>& noise, int n_classes, Rng& rng,
                   GradsT<T>* gen_grads) {
  auto gen_trace = forward(gen, noise, Mode::train, rng);
  const TensorT<T>& fake = gen_trace.output();
  auto dis_trace = forward(dis, fake, Mode::train, rng);
  auto cls_trace = forward(cls, fake, Mode::train, rng);
  const double value =
      bce(dis_trace.output(), const_target(dis_trace.output(), 1.0)) +
      kl_to_uniform(cls_trace.output(), n_classes);
  if (gen_grads) {
    auto g_dis = backward(dis, dis_trace,
                          bce_grad(dis_trace.output(), const_target(dis_trace.output(), 1.0)));
    auto g_cls = backward(cls, cls_trace, kl_to_uniform_grad(cls_trace.output(), n_classes));
    detail::add_tensors(g_dis.input, g_cls.input);
    *gen_grads = backward(gen, gen_trace, g_dis.input);
  }
  return value;
}

// Classifier loss L_cls = CE(cls(real), labels) + KL(cls(gen(n)) || uniform).
// Gradients are with respect to the classifier parameters only.
template <typename T>
double eval_loss_cls(ModelT<T>& cls, ModelT<T>& gen, const TensorT<T>& real,
                     const std::vector<int>& labels, const TensorT<T>& noise,
                     int n_classes, Rng& rng, GradsT<T>* cls_grads) {
  auto gen_trace = forward(gen, noise, Mode::train, rng);
  const TensorT<T>& fake = gen_trace.output();
  auto real_trace = forward(cls, real, Mode::train, rng);
  auto fake_trace = forward(cls, fake, Mode::train, rng);
  const double value = ce_loss(real_trace.output(), labels) +
                       kl_to_uniform(fake_trace.output(), n_classes);
  if (cls_grads) {
    auto g_real = backward(cls, real_trace, ce_loss_grad(real_trace.output(), labels));
    auto g_fake =
        backward(cls, fake_trace, kl_to_uniform_grad(fake_trace.output(), n_classes));
    detail::add_param_grads(g_real, g_fake);
    *cls_grads = std::move(g_real);
  }
  return value;
}

// Plain cross-entropy step loss (the ce baseline).
template <typename T>
double eval_loss_ce(ModelT<T>& cls, const TensorT<T>& real, const std::vector<int>& labels,
                    Rng& rng, GradsT<T>* cls_grads) {
  auto trace = forward(cls, real, Mode::train, rng);
  const double value = ce_loss(trace.output(), labels);
  if (cls_grads) {
    *cls_grads = backward(cls, trace, ce_loss_grad(trace.output(), labels));
  }
  return value;
}

// ---------------------------------------------------------------------------
// Training loop

struct TrainerConfig {
  TrainMode mode = TrainMode::joint;
  TrainSchedule schedule;
  std::uint64_t seed = 42;
  int noise_dim = kDefaultNoiseDim;
};

class Trainer;

// Called after each parameter update inside one iteration; `substep` is 1
// (discriminator), 2 (generator) or 3 (classifier; the only substep in ce
// mode). Lets tests observe Alg.-1 step ordering.
using SubstepHook = std::function<void(int substep, const Trainer& trainer)>;

// Owns the models, optimizer states and rng streams for one training run.
// Sequential per batch: (1) discriminator on L_d, (2) generator on L_g,
// (3) classifier on L_cls, each with its own Adam state; the noise batch is
// sampled once per iteration and shared by the three steps, and gen(n) is
// recomputed with current weights at each step.
class Trainer {
 public:
  Trainer(const TrainerConfig& config, const ModelSpec& cls_spec,
          std::optional<ModelSpec> gen_spec = std::nullopt,
          std::optional<ModelSpec> dis_spec = std::nullopt);

  // Runs `epochs` additional epochs over the dataset. Epoch boundaries are
  // derived from the iteration counter, so a run resumed from a checkpoint
  // continues exactly where the saved run stopped.
  void run_epochs(const LabeledBatch& data, int epochs, const SubstepHook& hook = {});

  // One iteration over an explicit batch.
  void step(const LabeledBatch& batch, const SubstepHook& hook = {});

  const TrainerConfig& config() const { return config_; }
  std::uint64_t iteration() const { return iteration_; }
  const std::vector<LossRow>& log() const { return log_; }

  Model& cls() { return cls_; }
  const Model& cls() const { return cls_; }
  Model& gen();
  const Model& gen() const;
  Model& dis();
  const Model& dis() const;

  AdamState& cls_opt() { return cls_opt_; }
  const AdamState& cls_opt() const { return cls_opt_; }
  AdamState& gen_opt();
  const AdamState& gen_opt() const;
  AdamState& dis_opt();
  const AdamState& dis_opt() const;

  Rng& train_rng() { return rng_; }
  const Rng& train_rng() const { return rng_; }
  void set_iteration(std::uint64_t it) { iteration_ = it; }
  std::vector<LossRow>& mutable_log() { return log_; }

 private:
  int batches_per_epoch(int n_samples) const;

  TrainerConfig config_;
  Model cls_;
  std::optional<Model> gen_;
  std::optional<Model> dis_;
  AdamState cls_opt_;
  AdamState gen_opt_;
  AdamState dis_opt_;
  Rng rng_;
  std::uint64_t iteration_ = 0;
  std::vector<LossRow> log_;
};

// A finished run: the loss log plus the trained models.
struct TrainRun {
  TrainMode mode = TrainMode::joint;
  TrainSchedule schedule;
  std::uint64_t seed = 42;
  std::vector<LossRow> log;
  Model cls;
  std::optional<Model> gen;
  std::optional<Model> dis;
};

// Joint GAN-assisted training of {cls, gen, dis} on an in-distribution
// dataset.
TrainRun train_joint(const LabeledBatch& data, const ModelSpec& cls_spec,
                     const ModelSpec& gen_spec, const ModelSpec& dis_spec,
                     const TrainSchedule& schedule, std::uint64_t seed,
                     const SubstepHook& hook = {});

// Cross-entropy baseline training of the classifier alone.
TrainRun train_ce(const LabeledBatch& data, const ModelSpec& cls_spec,
                  const TrainSchedule& schedule, std::uint64_t seed,
                  const SubstepHook& hook = {});

// Writes the loss log as CSV: "iteration,lr,L_d,L_g,L_cls" per row in joint
// mode, "iteration,lr,CE" in ce mode.
std::string loss_log_csv(TrainMode mode, const std::vector<LossRow>& log);

}  // namespace oodkit

#endif  // OODKIT_TRAINING_HPP_
