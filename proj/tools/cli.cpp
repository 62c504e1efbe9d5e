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

#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "oodkit/checkpoint.hpp"
#include "oodkit/class_stats.hpp"
#include "oodkit/errors.hpp"
#include "oodkit/evaluation.hpp"
#include "oodkit/fsio.hpp"
#include "oodkit/synthetic.hpp"
#include "oodkit/tensor_io.hpp"

namespace oodkit::cli {

namespace fs = std::filesystem;

std::string usage_text() {
  return
      "usage: oodkit <subcommand> [flags]\n"
      "\n"
      "subcommands:\n"
      "  gen-data   render the synthetic dataset into <out>/data\n"
      "  train      train on <out>/data (--mode ce|joint)\n"
      "  fit-stats  fit class-conditioned Gaussians on training logits\n"
      "  score      score a single sample tensor (--input, --kind)\n"
      "  eval       detection accuracy + AUPR report (--scores list)\n"
      "  pr-curve   export one precision-recall curve as CSV\n"
      "\n"
      "common flags:\n"
      "  --config PATH   JSON config file (desk-scale defaults when absent)\n"
      "  --seed N        rng seed (default 42)\n"
      "  --out DIR       workspace directory for all artifacts\n"
      "  --mode M        pipeline branch: ce or joint (default joint)\n"
      "  --set K=V       config override, repeatable (e.g. train.epochs=4)\n"
      "  --scores LIST   eval score kinds (default softmax,cossim,chi2,mi)\n";
}

CommandPlan parse_command(const std::vector<std::string>& args) {
  CLI::App app{"GAN-assisted out-of-distribution detection toolkit"};
  app.require_subcommand(1);

  CommandPlan plan;
  std::string mode_str = "joint";
  std::string scores_str = "softmax,cossim,chi2,mi";
  std::string kind_str = "softmax";
  std::string positive_str = "in";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", plan.config_path, "JSON config file");
    sub->add_option("--seed", plan.seed, "rng seed (default 42)");
    sub->add_option("--out", plan.out_dir, "workspace directory")->required();
    sub->add_option("--set", plan.overrides, "config override section.key=value");
    sub->add_option("--mode", mode_str, "pipeline branch: ce|joint")
        ->check(CLI::IsMember({"ce", "joint"}));
  };

  add_common(app.add_subcommand("gen-data", "render the synthetic dataset"));
  add_common(app.add_subcommand("train", "train classifier (+ GAN in joint mode)"));
  add_common(app.add_subcommand("fit-stats", "fit class-conditioned Gaussian statistics"));

  CLI::App* score = app.add_subcommand("score", "score one sample tensor");
  add_common(score);
  score->add_option("--input", plan.input_path, "sample tensor file")->required();
  score->add_option("--kind", kind_str, "score kind: softmax|cossim|chi2|mi")
      ->check(CLI::IsMember({"softmax", "cossim", "chi2", "mi"}));

  CLI::App* eval = app.add_subcommand("eval", "evaluate OOD detection metrics");
  add_common(eval);
  eval->add_option("--scores", scores_str, "comma-separated score kinds");

  CLI::App* pr = app.add_subcommand("pr-curve", "export a precision-recall curve");
  add_common(pr);
  pr->add_option("--kind", kind_str, "score kind: softmax|cossim|chi2|mi")
      ->check(CLI::IsMember({"softmax", "cossim", "chi2", "mi"}));
  pr->add_option("--positive", positive_str, "positive class: in|out")
      ->check(CLI::IsMember({"in", "out"}));

  // CLI11 consumes arguments back to front.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(usage_text());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  plan.subcommand = app.get_subcommands().front()->get_name();
  plan.mode = train_mode_from_name(mode_str);
  plan.kind = score_kind_from_name(kind_str);
  plan.positive = positive_str == "in" ? PositiveClass::in_dist : PositiveClass::out_dist;

  plan.scores.clear();
  std::stringstream ss(scores_str);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      plan.scores.push_back(score_kind_from_name(item));
    } catch (const InvalidSpecError&) {
      throw UsageError("--scores: unknown score kind '" + item + "'");
    }
  }
  if (plan.scores.empty()) throw UsageError("--scores: empty score kind list");
  return plan;
}

namespace {

struct Workspace {
  fs::path out;
  TrainMode mode;

  fs::path data_dir() const { return out / "data"; }
  fs::path train_dir() const {
    return out / (std::string("train_") + train_mode_name(mode));
  }
  fs::path checkpoint_path() const { return train_dir() / "checkpoint.oodc"; }
  fs::path loss_log_path() const { return train_dir() / "train_log.csv"; }
  fs::path stats_path() const {
    return out / (std::string("stats_") + train_mode_name(mode) + ".json");
  }
  fs::path report_path() const {
    return out / (std::string("report_") + train_mode_name(mode) + ".json");
  }
};

LabeledBatch load_named_split(const Workspace& ws, const std::string& manifest_name) {
  const fs::path manifest_path = ws.data_dir() / manifest_name;
  if (!file_exists(manifest_path.string())) {
    throw IoError("missing dataset manifest '" + manifest_path.string() +
                  "' (run gen-data first)");
  }
  const DatasetManifest manifest = load_manifest(manifest_path.string());
  return load_split(manifest, ws.data_dir().string());
}

Trainer make_trainer(const RunConfig& config, const CommandPlan& plan) {
  TrainerConfig tc;
  tc.mode = plan.mode;
  tc.schedule = config.train;
  tc.seed = plan.seed;
  tc.noise_dim = config.model.noise_dim;
  if (plan.mode == TrainMode::joint) {
    return Trainer(tc, make_classifier_spec(config.model), make_generator_spec(config.model),
                   make_discriminator_spec(config.model));
  }
  return Trainer(tc, make_classifier_spec(config.model));
}

Trainer restore_trainer(const RunConfig& config, const CommandPlan& plan,
                        const Workspace& ws) {
  const fs::path path = ws.checkpoint_path();
  if (!file_exists(path.string())) {
    throw IoError("missing checkpoint '" + path.string() + "' (run train first)");
  }
  Trainer trainer = make_trainer(config, plan);
  load_checkpoint(trainer, path.string());
  return trainer;
}

// Inference logits (pre-softmax) over a whole sample tensor, chunked.
Tensor collect_logits(const Model& cls, const Tensor& samples) {
  const int n = samples.dim(0);
  const int chunk = 512;
  const int classes = cls.output_shape().back();
  Tensor logits(Shape{n, classes});
  for (int begin = 0; begin < n; begin += chunk) {
    const int end = std::min(n, begin + chunk);
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(end - begin));
    for (int i = begin; i < end; ++i) idx.push_back(i);
    const Tensor part = classifier_logits(cls, take_rows(samples, idx));
    for (int i = begin; i < end; ++i) {
      for (int c = 0; c < classes; ++c) logits.at(i, c) = part.at(i - begin, c);
    }
  }
  return logits;
}

const ClassConditionalStats* maybe_load_stats(const Workspace& ws,
                                              const std::vector<ScoreKind>& kinds,
                                              ClassConditionalStats& storage) {
  bool needed = false;
  for (ScoreKind k : kinds) {
    if (k == ScoreKind::cossim || k == ScoreKind::chi2) needed = true;
  }
  if (!needed) return nullptr;
  const fs::path path = ws.stats_path();
  if (!file_exists(path.string())) {
    throw IoError("missing statistics file '" + path.string() + "' (run fit-stats first)");
  }
  storage = load_class_stats(path.string());
  return &storage;
}

int run_gen_data(const CommandPlan& plan, const RunConfig& config, const Workspace& ws) {
  (void)plan;
  const GeneratedDataset generated =
      generate_synthetic(config.dataset, ws.data_dir().string());
  for (const DatasetManifest* m : {&generated.train, &generated.test, &generated.ood}) {
    validate_split(*m, ws.data_dir().string());
  }
  std::cout << "gen-data: wrote " << ws.data_dir().string() << " (train/test/ood)\n";
  return 0;
}

int run_train(const CommandPlan& plan, const RunConfig& config, const Workspace& ws) {
  const LabeledBatch train_split = load_named_split(ws, "din_train.json");
  Trainer trainer = make_trainer(config, plan);
  trainer.run_epochs(train_split, config.train.epochs);
  fs::create_directories(ws.train_dir());
  atomic_write_file(ws.loss_log_path().string(),
                    loss_log_csv(plan.mode, trainer.log()));
  save_checkpoint(trainer, ws.checkpoint_path().string());
  const LossRow& last = trainer.log().back();
  std::cout << "train(" << train_mode_name(plan.mode) << "): " << trainer.iteration()
            << " iterations";
  if (plan.mode == TrainMode::joint) {
    std::printf(", final L_d=%.4f L_g=%.4f L_cls=%.4f\n", last.l_d, last.l_g, last.l_cls);
  } else {
    std::printf(", final CE=%.4f\n", last.l_cls);
  }
  std::cout << "train: wrote " << ws.checkpoint_path().string() << "\n";
  return 0;
}

int run_fit_stats(const CommandPlan& plan, const RunConfig& config, const Workspace& ws) {
  Trainer trainer = restore_trainer(config, plan, ws);
  const LabeledBatch train_split = load_named_split(ws, "din_train.json");
  const Tensor logits = collect_logits(trainer.cls(), train_split.inputs);
  const ClassConditionalStats stats = fit_class_stats(
      logits, train_split.labels, config.dataset.n_classes, config.epsilon);
  save_class_stats(stats, ws.stats_path().string());
  std::cout << "fit-stats: wrote " << ws.stats_path().string() << " (dof=" << stats.dof
            << ", epsilon=" << stats.epsilon << ")\n";
  return 0;
}

int run_score(const CommandPlan& plan, const RunConfig& config, const Workspace& ws) {
  Trainer trainer = restore_trainer(config, plan, ws);
  ClassConditionalStats stats_storage;
  const ClassConditionalStats* stats =
      maybe_load_stats(ws, {plan.kind}, stats_storage);

  Tensor sample = read_tensor_file(plan.input_path);
  if (sample.rank() == static_cast<int>(trainer.cls().spec.input_shape.size())) {
    Shape batched = sample.shape;
    batched.insert(batched.begin(), 1);
    sample = sample.reshaped(batched);
  }
  Rng rng = derived_rng(plan.seed, 0x5C02EULL);
  const std::vector<ScoreRecord> records =
      score_samples(trainer.cls(), sample, plan.kind, stats, config.mc_passes, rng);
  const std::string text = records.front().to_text();
  const fs::path path =
      ws.out / (std::string("score_") + train_mode_name(plan.mode) + "_" +
                score_kind_name(plan.kind) + ".json");
  atomic_write_file(path.string(), text);
  std::cout << text;
  return 0;
}

int run_eval(const CommandPlan& plan, const RunConfig& config, const Workspace& ws) {
  Trainer trainer = restore_trainer(config, plan, ws);
  ClassConditionalStats stats_storage;
  const ClassConditionalStats* stats = maybe_load_stats(ws, plan.scores, stats_storage);
  const LabeledBatch din_test = load_named_split(ws, "din_test.json");
  const LabeledBatch dout = load_named_split(ws, "dout.json");

  const EvalReport report = run_evaluation(trainer.cls(), stats, din_test, dout,
                                           plan.scores, plan.seed, config.mc_passes);
  save_eval_report(report, ws.report_path().string());
  std::printf("classifier_accuracy %.4f\n", report.classifier_accuracy);
  for (const auto& row : report.scores) {
    std::printf("%-8s detection_accuracy %.4f  aupr_in %.4f  aupr_out %.4f\n",
                score_kind_name(row.kind), row.threshold.detection_accuracy, row.aupr_in,
                row.aupr_out);
  }
  std::cout << "eval: wrote " << ws.report_path().string() << "\n";
  return 0;
}

int run_pr_curve(const CommandPlan& plan, const RunConfig& config, const Workspace& ws) {
  Trainer trainer = restore_trainer(config, plan, ws);
  ClassConditionalStats stats_storage;
  const ClassConditionalStats* stats =
      maybe_load_stats(ws, {plan.kind}, stats_storage);
  const LabeledBatch din_test = load_named_split(ws, "din_test.json");
  const LabeledBatch dout = load_named_split(ws, "dout.json");

  const ScoredPopulation pop = score_populations(trainer.cls(), stats, din_test, dout,
                                                 plan.kind, plan.seed, config.mc_passes);
  const std::vector<PrPoint> curve = pr_curve(pop, plan.positive);
  const fs::path path =
      ws.out / (std::string("pr_") + train_mode_name(plan.mode) + "_" +
                score_kind_name(plan.kind) + "_" +
                (plan.positive == PositiveClass::in_dist ? "in" : "out") + ".csv");
  atomic_write_file(path.string(), pr_curve_csv(curve));
  std::cout << "pr-curve: wrote " << path.string() << " (" << curve.size() << " points, aupr "
            << aupr(curve) << ")\n";
  return 0;
}

}  // namespace

int execute(const CommandPlan& plan) {
  const RunConfig config = load_run_config(plan.config_path, plan.overrides, plan.seed);
  Workspace ws{fs::path(plan.out_dir), plan.mode};
  fs::create_directories(ws.out);

  if (plan.subcommand == "gen-data") return run_gen_data(plan, config, ws);
  if (plan.subcommand == "train") return run_train(plan, config, ws);
  if (plan.subcommand == "fit-stats") return run_fit_stats(plan, config, ws);
  if (plan.subcommand == "score") return run_score(plan, config, ws);
  if (plan.subcommand == "eval") return run_eval(plan, config, ws);
  if (plan.subcommand == "pr-curve") return run_pr_curve(plan, config, ws);
  throw UsageError("unknown subcommand '" + plan.subcommand + "'");
}

}  // namespace oodkit::cli
