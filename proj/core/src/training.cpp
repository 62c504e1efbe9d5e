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

#include "oodkit/training.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace oodkit {

void validate_labeled_batch(const LabeledBatch& batch, int n_classes) {
  if (batch.inputs.rank() < 2) {
    throw DimensionError("labeled batch inputs need a leading sample axis");
  }
  for (float v : batch.inputs.data) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw DomainError("labeled batch values must lie in [0, 1]");
    }
  }
  if (!batch.labels.empty()) {
    if (static_cast<int>(batch.labels.size()) != batch.size()) {
      throw DimensionError("labeled batch: label count does not match sample count");
    }
    for (int label : batch.labels) {
      if (label < 0 || label >= n_classes) {
        throw IndexError("labeled batch: label " + std::to_string(label) +
                         " outside [0, " + std::to_string(n_classes) + ")");
      }
    }
  }
}

const char* train_mode_name(TrainMode mode) {
  return mode == TrainMode::ce ? "ce" : "joint";
}

TrainMode train_mode_from_name(const std::string& name) {
  if (name == "ce") return TrainMode::ce;
  if (name == "joint") return TrainMode::joint;
  throw InvalidSpecError("unknown train mode '" + name + "' (expected ce|joint)");
}

namespace {

// Distinct rng streams per purpose so checkpoint resume only has to carry
// the training stream.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kShuffleStreamBase = 2;

AdamState make_opt(Model& model) {
  return AdamState::for_params(detail::param_ptrs(model));
}

void check_finite(double value, const char* which, std::uint64_t iteration) {
  if (!std::isfinite(value)) {
    throw DivergenceError(std::string("non-finite ") + which + " loss", iteration);
  }
}

}  // namespace

Trainer::Trainer(const TrainerConfig& config, const ModelSpec& cls_spec,
                 std::optional<ModelSpec> gen_spec, std::optional<ModelSpec> dis_spec)
    : config_(config), cls_(Model{}), rng_(derived_rng(config.seed, kTrainStream)) {
  config_.schedule.validate();
  Rng init_rng = derived_rng(config_.seed, kInitStream);
  cls_ = build_model(cls_spec, init_rng);
  if (config_.mode == TrainMode::joint) {
    if (!gen_spec || !dis_spec) {
      throw InvalidSpecError("joint training needs generator and discriminator specs");
    }
    gen_ = build_model(*gen_spec, init_rng);
    dis_ = build_model(*dis_spec, init_rng);
    if (gen_->spec.input_shape != Shape{config_.noise_dim}) {
      throw InvalidSpecError("generator input must match noise_dim " +
                             std::to_string(config_.noise_dim));
    }
    if (gen_->output_shape() != cls_.spec.input_shape ||
        dis_->spec.input_shape != cls_.spec.input_shape) {
      throw InvalidSpecError(
          "generator output, discriminator input and classifier input must agree");
    }
    gen_opt_ = make_opt(*gen_);
    dis_opt_ = make_opt(*dis_);
  }
  cls_opt_ = make_opt(cls_);
}

Model& Trainer::gen() {
  if (!gen_) throw StateError("no generator in ce mode");
  return *gen_;
}
const Model& Trainer::gen() const {
  if (!gen_) throw StateError("no generator in ce mode");
  return *gen_;
}
Model& Trainer::dis() {
  if (!dis_) throw StateError("no discriminator in ce mode");
  return *dis_;
}
const Model& Trainer::dis() const {
  if (!dis_) throw StateError("no discriminator in ce mode");
  return *dis_;
}
AdamState& Trainer::gen_opt() {
  if (!gen_) throw StateError("no generator in ce mode");
  return gen_opt_;
}
const AdamState& Trainer::gen_opt() const {
  if (!gen_) throw StateError("no generator in ce mode");
  return gen_opt_;
}
AdamState& Trainer::dis_opt() {
  if (!dis_) throw StateError("no discriminator in ce mode");
  return dis_opt_;
}
const AdamState& Trainer::dis_opt() const {
  if (!dis_) throw StateError("no discriminator in ce mode");
  return dis_opt_;
}

int Trainer::batches_per_epoch(int n_samples) const {
  // Incomplete final batches are dropped to keep batch statistics stable.
  return n_samples / config_.schedule.batch_size;
}

void Trainer::step(const LabeledBatch& batch, const SubstepHook& hook) {
  const double lr = lr_at(iteration_, config_.schedule);
  LossRow row;
  row.iteration = iteration_;
  row.lr = lr;

  if (config_.mode == TrainMode::joint) {
    const int n_classes = cls_.spec.n_classes;
    const Tensor noise = sample_noise(config_.noise_dim, batch.size(), rng_);

    // 1) discriminator
    Grads d_grads;
    row.l_d = eval_loss_d(*dis_, *gen_, batch.inputs, noise, rng_, &d_grads);
    check_finite(row.l_d, "discriminator", iteration_);
    adam_step(detail::param_ptrs(*dis_), detail::grad_ptrs(d_grads), dis_opt_, lr);
    if (hook) hook(1, *this);

    // 2) generator
    Grads g_grads;
    row.l_g = eval_loss_g(*gen_, *dis_, cls_, noise, n_classes, rng_, &g_grads);
    check_finite(row.l_g, "generator", iteration_);
    adam_step(detail::param_ptrs(*gen_), detail::grad_ptrs(g_grads), gen_opt_, lr);
    if (hook) hook(2, *this);

    // 3) classifier
    Grads c_grads;
    row.l_cls = eval_loss_cls(cls_, *gen_, batch.inputs, batch.labels, noise, n_classes,
                              rng_, &c_grads);
    check_finite(row.l_cls, "classifier", iteration_);
    adam_step(detail::param_ptrs(cls_), detail::grad_ptrs(c_grads), cls_opt_, lr);
    if (hook) hook(3, *this);
  } else {
    Grads c_grads;
    row.l_cls = eval_loss_ce(cls_, batch.inputs, batch.labels, rng_, &c_grads);
    check_finite(row.l_cls, "cross-entropy", iteration_);
    adam_step(detail::param_ptrs(cls_), detail::grad_ptrs(c_grads), cls_opt_, lr);
    if (hook) hook(3, *this);
  }

  log_.push_back(row);
  iteration_ += 1;
}

void Trainer::run_epochs(const LabeledBatch& data, int epochs, const SubstepHook& hook) {
  validate_labeled_batch(data, cls_.spec.n_classes);
  if (data.size() == 0) throw EmptyInputError("training dataset is empty");
  const int per_epoch = batches_per_epoch(data.size());
  if (per_epoch == 0) {
    throw InvalidSpecError("dataset smaller than one batch (" +
                           std::to_string(data.size()) + " < " +
                           std::to_string(config_.schedule.batch_size) + ")");
  }
  const std::uint64_t start_epoch = iteration_ / static_cast<std::uint64_t>(per_epoch);
  const std::uint64_t end_epoch = start_epoch + static_cast<std::uint64_t>(epochs);
  std::vector<int> order(static_cast<std::size_t>(data.size()));
  for (std::uint64_t epoch = start_epoch; epoch < end_epoch; ++epoch) {
    // The shuffle is a pure function of (seed, epoch): resuming mid-epoch
    // rebuilds the same order without replaying the training stream.
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = derived_rng(config_.seed, kShuffleStreamBase + epoch);
    shuffle_rng.shuffle(order);

    int start_batch = 0;
    if (epoch == start_epoch) {
      start_batch = static_cast<int>(iteration_ % static_cast<std::uint64_t>(per_epoch));
    }
    for (int b = start_batch; b < per_epoch; ++b) {
      const int begin = b * config_.schedule.batch_size;
      std::vector<int> idx(order.begin() + begin,
                           order.begin() + begin + config_.schedule.batch_size);
      LabeledBatch mini;
      mini.inputs = take_rows(data.inputs, idx);
      mini.labels.reserve(idx.size());
      for (int j : idx) mini.labels.push_back(data.labels[static_cast<std::size_t>(j)]);
      mini.origin = data.origin;
      step(mini, hook);
    }
  }
}

namespace {

TrainRun finish_run(Trainer&& trainer, TrainMode mode, const TrainSchedule& schedule,
                    std::uint64_t seed) {
  TrainRun run;
  run.mode = mode;
  run.schedule = schedule;
  run.seed = seed;
  run.log = trainer.log();
  run.cls = std::move(trainer.cls());
  if (mode == TrainMode::joint) {
    run.gen = std::move(trainer.gen());
    run.dis = std::move(trainer.dis());
  }
  return run;
}

}  // namespace

TrainRun train_joint(const LabeledBatch& data, const ModelSpec& cls_spec,
                     const ModelSpec& gen_spec, const ModelSpec& dis_spec,
                     const TrainSchedule& schedule, std::uint64_t seed,
                     const SubstepHook& hook) {
  TrainerConfig config;
  config.mode = TrainMode::joint;
  config.schedule = schedule;
  config.seed = seed;
  config.noise_dim = gen_spec.input_shape.empty() ? kDefaultNoiseDim : gen_spec.input_shape[0];
  Trainer trainer(config, cls_spec, gen_spec, dis_spec);
  trainer.run_epochs(data, schedule.epochs, hook);
  return finish_run(std::move(trainer), TrainMode::joint, schedule, seed);
}

TrainRun train_ce(const LabeledBatch& data, const ModelSpec& cls_spec,
                  const TrainSchedule& schedule, std::uint64_t seed,
                  const SubstepHook& hook) {
  TrainerConfig config;
  config.mode = TrainMode::ce;
  config.schedule = schedule;
  config.seed = seed;
  Trainer trainer(config, cls_spec);
  trainer.run_epochs(data, schedule.epochs, hook);
  return finish_run(std::move(trainer), TrainMode::ce, schedule, seed);
}

std::string loss_log_csv(TrainMode mode, const std::vector<LossRow>& log) {
  std::ostringstream os;
  char buf[160];
  if (mode == TrainMode::joint) {
    os << "iteration,lr,L_d,L_g,L_cls\n";
    for (const LossRow& r : log) {
      std::snprintf(buf, sizeof buf, "%llu,%.9g,%.9g,%.9g,%.9g\n",
                    static_cast<unsigned long long>(r.iteration), r.lr, r.l_d, r.l_g,
                    r.l_cls);
      os << buf;
    }
  } else {
    os << "iteration,lr,CE\n";
    for (const LossRow& r : log) {
      std::snprintf(buf, sizeof buf, "%llu,%.9g,%.9g\n",
                    static_cast<unsigned long long>(r.iteration), r.lr, r.l_cls);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace oodkit
