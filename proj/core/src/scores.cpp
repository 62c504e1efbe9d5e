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

#include "oodkit/scores.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "oodkit/errors.hpp"
#include "oodkit/gamma.hpp"

namespace oodkit {

const char* score_kind_name(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::softmax: return "softmax";
    case ScoreKind::cossim: return "cossim";
    case ScoreKind::chi2: return "chi2";
    case ScoreKind::mi: return "mi";
  }
  return "?";
}

ScoreKind score_kind_from_name(const std::string& name) {
  for (ScoreKind k : {ScoreKind::softmax, ScoreKind::cossim, ScoreKind::chi2, ScoreKind::mi}) {
    if (name == score_kind_name(k)) return k;
  }
  throw InvalidSpecError("unknown score kind '" + name + "'");
}

std::string ScoreRecord::to_text() const {
  std::ostringstream os;
  char buf[40];
  os << "{\n  \"kind\": \"" << score_kind_name(kind) << "\",\n";
  std::snprintf(buf, sizeof buf, "%.9g", q);
  os << "  \"q\": " << buf << ",\n";
  os << "  \"predicted_class\": " << predicted_class;
  if (kind == ScoreKind::chi2) {
    std::snprintf(buf, sizeof buf, "%.9g", d_m);
    os << ",\n  \"d_m\": " << buf;
  }
  os << "\n}\n";
  return os.str();
}

double cosine_score(const std::vector<double>& x, const ClassConditionalStats& stats,
                    int class_id) {
  if (class_id < 0 || class_id >= stats.n_classes()) {
    throw IndexError("cosine_score: class " + std::to_string(class_id) + " not fitted");
  }
  const std::vector<double>& mu = stats.classes[static_cast<std::size_t>(class_id)].mean;
  if (x.size() != mu.size()) {
    throw DimensionError("cosine_score: vector dimension does not match fitted mean");
  }
  double dot = 0.0, xx = 0.0, mm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * mu[i];
    xx += x[i] * x[i];
    mm += mu[i] * mu[i];
  }
  if (xx == 0.0 || mm == 0.0) {
    throw DegenerateInputError("cosine_score: zero-norm vector");
  }
  return dot / (std::sqrt(xx) * std::sqrt(mm));
}

double chi2_confidence(double d_m, int dof) {
  if (d_m < 0.0) throw DomainError("chi2_confidence: distance must be non-negative");
  if (dof < 1) throw DomainError("chi2_confidence: dof must be >= 1");
  return gamma_q(0.5 * dof, 0.5 * d_m * d_m);
}

std::pair<double, int> softmax_score(const std::vector<double>& probs_row) {
  if (probs_row.empty()) throw EmptyInputError("softmax_score: empty row");
  double best = probs_row[0];
  int arg = 0;
  for (std::size_t i = 1; i < probs_row.size(); ++i) {
    if (probs_row[i] > best) {
      best = probs_row[i];
      arg = static_cast<int>(i);
    }
  }
  return {best, arg};
}

namespace {

double entropy_nats(const double* p, int n) {
  double h = 0.0;
  for (int i = 0; i < n; ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

}  // namespace

std::vector<double> mc_dropout_mi_batch(const Model& model, const Tensor& inputs,
                                        int passes, Rng& rng) {
  if (!model.has_dropout()) {
    throw InvalidModelError("mc_dropout_mi requires a model with a dropout layer");
  }
  if (passes < 2) throw InvalidSpecError("mc_dropout_mi: need at least 2 passes");
  const int batch = inputs.dim(0);
  const int classes = model.output_shape().back();

  std::vector<double> mean_probs(static_cast<std::size_t>(batch) * classes, 0.0);
  std::vector<double> mean_entropy(static_cast<std::size_t>(batch), 0.0);
  std::vector<double> row(static_cast<std::size_t>(classes));
  for (int t = 0; t < passes; ++t) {
    const Tensor probs = forward(model, inputs, Mode::mc_dropout, rng).output();
    for (int b = 0; b < batch; ++b) {
      for (int c = 0; c < classes; ++c) {
        row[static_cast<std::size_t>(c)] = probs.at(b, c);
        mean_probs[static_cast<std::size_t>(b) * classes + c] += row[static_cast<std::size_t>(c)];
      }
      mean_entropy[static_cast<std::size_t>(b)] += entropy_nats(row.data(), classes);
    }
  }
  std::vector<double> mi(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    double* mp = &mean_probs[static_cast<std::size_t>(b) * classes];
    for (int c = 0; c < classes; ++c) mp[c] /= passes;
    mi[static_cast<std::size_t>(b)] =
        entropy_nats(mp, classes) - mean_entropy[static_cast<std::size_t>(b)] / passes;
  }
  return mi;
}

double mc_dropout_mi(const Model& model, const Tensor& input, int passes, Rng& rng) {
  Tensor batched = input;
  if (input.rank() == static_cast<int>(model.spec.input_shape.size())) {
    Shape s = input.shape;
    s.insert(s.begin(), 1);
    batched = input.reshaped(s);
  }
  return mc_dropout_mi_batch(model, batched, passes, rng)[0];
}

ScoreRecord score_output(ScoreKind kind, const std::vector<double>& logits,
                         const std::vector<double>& probs,
                         const ClassConditionalStats* stats) {
  const auto [q_softmax, predicted] = softmax_score(probs);
  ScoreRecord rec;
  rec.kind = kind;
  rec.predicted_class = predicted;
  switch (kind) {
    case ScoreKind::softmax:
      rec.q = q_softmax;
      break;
    case ScoreKind::cossim:
      if (!stats) throw StateError("cossim scoring requires fitted class stats");
      rec.q = cosine_score(logits, *stats, predicted);
      break;
    case ScoreKind::chi2: {
      if (!stats) throw StateError("chi2 scoring requires fitted class stats");
      rec.d_m = mahalanobis(logits, *stats, predicted);
      rec.q = chi2_confidence(rec.d_m, stats->dof);
      break;
    }
    case ScoreKind::mi:
      throw StateError("mi scoring needs stochastic forward passes, use score_samples");
  }
  return rec;
}

std::vector<ScoreRecord> score_samples(const Model& cls, const Tensor& samples,
                                       ScoreKind kind, const ClassConditionalStats* stats,
                                       int mc_passes, Rng& rng) {
  const int n = samples.dim(0);
  std::vector<ScoreRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  const int classes = cls.output_shape().back();

  if (kind == ScoreKind::mi) {
    // Predicted class still comes from the deterministic softmax pass.
    const Tensor probs = predict(cls, samples);
    const std::vector<double> mi = mc_dropout_mi_batch(cls, samples, mc_passes, rng);
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(static_cast<std::size_t>(classes));
      for (int c = 0; c < classes; ++c) row[static_cast<std::size_t>(c)] = probs.at(i, c);
      ScoreRecord rec;
      rec.kind = kind;
      rec.predicted_class = softmax_score(row).second;
      rec.q = mi[static_cast<std::size_t>(i)];
      records.push_back(rec);
    }
    return records;
  }

  if (cls.plans.back().spec.kind != LayerKind::softmax) {
    throw InvalidModelError("score_samples requires a softmax-terminated classifier");
  }
  Rng unused(0);
  const auto trace = forward(cls, samples, Mode::infer, unused);
  const Tensor& probs = trace.output();
  const Tensor& logits = trace.acts[trace.acts.size() - 2];
  for (int i = 0; i < n; ++i) {
    std::vector<double> logit_row(static_cast<std::size_t>(classes));
    std::vector<double> prob_row(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
      logit_row[static_cast<std::size_t>(c)] = logits.at(i, c);
      prob_row[static_cast<std::size_t>(c)] = probs.at(i, c);
    }
    records.push_back(score_output(kind, logit_row, prob_row, stats));
  }
  return records;
}

}  // namespace oodkit
