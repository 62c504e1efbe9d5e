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

#include "oodkit/evaluation.hpp"

#include <cstdio>
#include <sstream>

#include "oodkit/errors.hpp"
#include "oodkit/fsio.hpp"

namespace oodkit {

const ScoreKindReport& EvalReport::for_kind(ScoreKind kind) const {
  for (const auto& s : scores) {
    if (s.kind == kind) return s;
  }
  throw IndexError(std::string("report has no entry for score kind ") +
                   score_kind_name(kind));
}

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "{\n";
  os << "  \"classifier_accuracy\": " << fmt9(classifier_accuracy) << ",\n";
  os << "  \"scores\": {\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const ScoreKindReport& s = scores[i];
    os << "    \"" << score_kind_name(s.kind) << "\": {";
    os << "\"detection_accuracy\": " << fmt9(s.threshold.detection_accuracy);
    os << ", \"tau\": " << fmt9(s.threshold.tau);
    os << ", \"min_error\": " << fmt9(s.threshold.min_error);
    os << ", \"aupr_in\": " << fmt9(s.aupr_in);
    os << ", \"aupr_out\": " << fmt9(s.aupr_out);
    os << "}" << (i + 1 < scores.size() ? "," : "") << "\n";
  }
  os << "  }\n}\n";
  return os.str();
}

double classifier_accuracy(const Model& cls, const LabeledBatch& din_test) {
  if (din_test.size() == 0) throw EmptyInputError("classifier_accuracy: empty test set");
  if (din_test.labels.empty()) {
    throw StateError("classifier_accuracy: test set carries no labels");
  }
  const Tensor probs = predict(cls, din_test.inputs);
  const int classes = probs.dim(1);
  int correct = 0;
  for (int i = 0; i < din_test.size(); ++i) {
    int arg = 0;
    float best = probs.at(i, 0);
    for (int c = 1; c < classes; ++c) {
      if (probs.at(i, c) > best) {
        best = probs.at(i, c);
        arg = c;
      }
    }
    if (arg == din_test.labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / din_test.size();
}

namespace {

std::vector<double> q_values(const std::vector<ScoreRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.q);
  return out;
}

}  // namespace

ScoredPopulation score_populations(const Model& cls, const ClassConditionalStats* stats,
                                   const LabeledBatch& din_test, const LabeledBatch& dout,
                                   ScoreKind kind, std::uint64_t seed, int mc_passes) {
  // One derived stream per kind keeps reports identical regardless of which
  // subset of kinds is evaluated.
  Rng rng = derived_rng(seed, 0x5C07E000ULL + static_cast<std::uint64_t>(kind));
  ScoredPopulation pop;
  pop.scores_in = q_values(score_samples(cls, din_test.inputs, kind, stats, mc_passes, rng));
  pop.scores_out = q_values(score_samples(cls, dout.inputs, kind, stats, mc_passes, rng));
  pop.orientation =
      (kind == ScoreKind::mi) ? Orientation::high_is_out : Orientation::high_is_in;
  return pop;
}

EvalReport run_evaluation(const Model& cls, const ClassConditionalStats* stats,
                          const LabeledBatch& din_test, const LabeledBatch& dout,
                          const std::vector<ScoreKind>& kinds, std::uint64_t seed,
                          int mc_passes) {
  if (din_test.size() == 0 || dout.size() == 0) {
    throw EmptyInputError("run_evaluation: both test populations must be nonempty");
  }
  EvalReport report;
  report.classifier_accuracy = classifier_accuracy(cls, din_test);
  for (ScoreKind kind : kinds) {
    const ScoredPopulation pop =
        score_populations(cls, stats, din_test, dout, kind, seed, mc_passes);
    ScoreKindReport row;
    row.kind = kind;
    row.threshold = optimal_threshold(pop);
    row.aupr_in = aupr(pr_curve(pop, PositiveClass::in_dist));
    row.aupr_out = aupr(pr_curve(pop, PositiveClass::out_dist));
    report.scores.push_back(row);
  }
  return report;
}

void save_eval_report(const EvalReport& report, const std::string& path) {
  atomic_write_file(path, report.to_text());
}

}  // namespace oodkit
