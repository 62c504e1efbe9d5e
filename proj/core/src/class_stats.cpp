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

#include "oodkit/class_stats.hpp"

#include <cmath>
#include <cctype>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "oodkit/errors.hpp"
#include "oodkit/fsio.hpp"

namespace oodkit {

namespace detail {

std::vector<double> cholesky(const std::vector<double>& matrix, int k) {
  std::vector<double> chol(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = matrix[static_cast<std::size_t>(i) * k + j];
      for (int m = 0; m < j; ++m) {
        sum -= chol[static_cast<std::size_t>(i) * k + m] * chol[static_cast<std::size_t>(j) * k + m];
      }
      if (i == j) {
        if (!(sum > 0.0)) {
          throw NumericalError("covariance factorization failed: pivot " +
                               std::to_string(i) + " is " + std::to_string(sum));
        }
        chol[static_cast<std::size_t>(i) * k + j] = std::sqrt(sum);
      } else {
        chol[static_cast<std::size_t>(i) * k + j] =
            sum / chol[static_cast<std::size_t>(j) * k + j];
      }
    }
  }
  return chol;
}

}  // namespace detail

namespace {

void factorize_class(ClassGaussian& cg, int k, double epsilon) {
  std::vector<double> shrunk = cg.cov;
  for (int i = 0; i < k; ++i) shrunk[static_cast<std::size_t>(i) * k + i] += epsilon;
  cg.chol = detail::cholesky(shrunk, k);
}

}  // namespace

ClassConditionalStats fit_class_stats(const std::vector<double>& logits, int n, int k,
                                      const std::vector<int>& labels, int n_classes,
                                      double epsilon) {
  if (n <= 0 || k <= 0) throw DimensionError("fit_class_stats: empty logit matrix");
  if (static_cast<std::size_t>(n) * k != logits.size()) {
    throw DimensionError("fit_class_stats: logits size does not match n*k");
  }
  if (static_cast<int>(labels.size()) != n) {
    throw DimensionError("fit_class_stats: label count does not match rows");
  }
  if (n_classes < 1) throw InvalidSpecError("fit_class_stats: n_classes must be >= 1");

  ClassConditionalStats stats;
  stats.dof = k;
  stats.classes.resize(static_cast<std::size_t>(n_classes));
  for (auto& cg : stats.classes) {
    cg.mean.assign(static_cast<std::size_t>(k), 0.0);
    cg.cov.assign(static_cast<std::size_t>(k) * k, 0.0);
  }

  for (int r = 0; r < n; ++r) {
    const int c = labels[static_cast<std::size_t>(r)];
    if (c < 0 || c >= n_classes) {
      throw IndexError("fit_class_stats: label " + std::to_string(c) + " outside [0, " +
                       std::to_string(n_classes) + ")");
    }
    ClassGaussian& cg = stats.classes[static_cast<std::size_t>(c)];
    cg.count += 1;
    for (int j = 0; j < k; ++j) {
      cg.mean[static_cast<std::size_t>(j)] += logits[static_cast<std::size_t>(r) * k + j];
    }
  }
  for (int c = 0; c < n_classes; ++c) {
    ClassGaussian& cg = stats.classes[static_cast<std::size_t>(c)];
    if (cg.count < 2) {
      throw InsufficientDataError("class " + std::to_string(c) + " has " +
                                  std::to_string(cg.count) +
                                  " samples; at least 2 are required");
    }
    for (int j = 0; j < k; ++j) cg.mean[static_cast<std::size_t>(j)] /= cg.count;
  }

  // Biased (1/N_c) covariance: the maximum-likelihood estimator.
  for (int r = 0; r < n; ++r) {
    ClassGaussian& cg = stats.classes[static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])];
    for (int i = 0; i < k; ++i) {
      const double di = logits[static_cast<std::size_t>(r) * k + i] - cg.mean[static_cast<std::size_t>(i)];
      for (int j = 0; j <= i; ++j) {
        const double dj = logits[static_cast<std::size_t>(r) * k + j] - cg.mean[static_cast<std::size_t>(j)];
        cg.cov[static_cast<std::size_t>(i) * k + j] += di * dj;
      }
    }
  }
  for (auto& cg : stats.classes) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double v = cg.cov[static_cast<std::size_t>(i) * k + j] / cg.count;
        cg.cov[static_cast<std::size_t>(i) * k + j] = v;
        cg.cov[static_cast<std::size_t>(j) * k + i] = v;
      }
    }
  }

  if (epsilon == kAutoEpsilon) {
    double max_scale = 0.0;
    for (const auto& cg : stats.classes) {
      double trace = 0.0;
      for (int i = 0; i < k; ++i) trace += cg.cov[static_cast<std::size_t>(i) * k + i];
      max_scale = std::max(max_scale, trace / k);
    }
    epsilon = 1e-5 * max_scale;
    if (epsilon <= 0.0) epsilon = 1e-12;  // all-identical samples
  } else if (epsilon < 0.0) {
    throw InvalidSpecError("fit_class_stats: epsilon must be non-negative");
  }
  stats.epsilon = epsilon;

  for (auto& cg : stats.classes) factorize_class(cg, k, epsilon);
  return stats;
}

ClassConditionalStats fit_class_stats(const Tensor& logits, const std::vector<int>& labels,
                                      int n_classes, double epsilon) {
  if (logits.rank() != 2) throw DimensionError("fit_class_stats expects (n, k) logits");
  std::vector<double> rows(logits.data.begin(), logits.data.end());
  return fit_class_stats(rows, logits.dim(0), logits.dim(1), labels, n_classes, epsilon);
}

double mahalanobis(const std::vector<double>& x, const ClassConditionalStats& stats,
                   int class_id) {
  const int k = stats.dof;
  if (static_cast<int>(x.size()) != k) {
    throw DimensionError("mahalanobis: vector dimension " + std::to_string(x.size()) +
                         " does not match dof " + std::to_string(k));
  }
  if (class_id < 0 || class_id >= stats.n_classes()) {
    throw IndexError("mahalanobis: class " + std::to_string(class_id) + " not fitted");
  }
  const ClassGaussian& cg = stats.classes[static_cast<std::size_t>(class_id)];
  if (cg.chol.empty()) throw StateError("mahalanobis: stats not factorized");

  // Solve L y = (x - mu); then d^2 = |y|^2.
  std::vector<double> y(static_cast<std::size_t>(k));
  double d2 = 0.0;
  for (int i = 0; i < k; ++i) {
    double sum = x[static_cast<std::size_t>(i)] - cg.mean[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      sum -= cg.chol[static_cast<std::size_t>(i) * k + j] * y[static_cast<std::size_t>(j)];
    }
    const double yi = sum / cg.chol[static_cast<std::size_t>(i) * k + i];
    y[static_cast<std::size_t>(i)] = yi;
    d2 += yi * yi;
  }
  return std::sqrt(d2);
}

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void emit_array(std::ostringstream& os, const std::vector<double>& values) {
  os << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ", ";
    os << fmt9(values[i]);
  }
  os << ']';
}

}  // namespace

std::string class_stats_to_text(const ClassConditionalStats& stats) {
  std::ostringstream os;
  os << "{\n";
  for (int c = 0; c < stats.n_classes(); ++c) {
    const ClassGaussian& cg = stats.classes[static_cast<std::size_t>(c)];
    os << "  \"" << c << "\": {\"mean\": ";
    emit_array(os, cg.mean);
    os << ", \"cov\": ";
    emit_array(os, cg.cov);
    os << "},\n";
  }
  os << "  \"dof\": " << stats.dof << ",\n";
  os << "  \"epsilon\": " << fmt9(stats.epsilon) << "\n";
  os << "}\n";
  return os.str();
}

ClassConditionalStats class_stats_from_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("stats document is not valid JSON: ") + e.what(), 0);
  }
  ClassConditionalStats stats;
  if (!doc.contains("dof") || !doc.contains("epsilon")) {
    throw FormatError("stats document missing dof/epsilon", 0);
  }
  stats.dof = doc.at("dof").get<int>();
  stats.epsilon = doc.at("epsilon").get<double>();
  const int k = stats.dof;

  int max_class = -1;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (!std::isdigit(static_cast<unsigned char>(key[0]))) continue;
    max_class = std::max(max_class, std::stoi(key));
  }
  if (max_class < 0) throw FormatError("stats document has no class entries", 0);
  stats.classes.resize(static_cast<std::size_t>(max_class) + 1);
  for (int c = 0; c <= max_class; ++c) {
    const std::string key = std::to_string(c);
    if (!doc.contains(key)) {
      throw FormatError("stats document missing class " + key, 0);
    }
    const auto& entry = doc.at(key);
    ClassGaussian& cg = stats.classes[static_cast<std::size_t>(c)];
    cg.mean = entry.at("mean").get<std::vector<double>>();
    cg.cov = entry.at("cov").get<std::vector<double>>();
    if (static_cast<int>(cg.mean.size()) != k ||
        static_cast<int>(cg.cov.size()) != k * k) {
      throw FormatError("stats class " + key + " has wrong mean/cov dimensions", 0);
    }
    factorize_class(cg, k, stats.epsilon);
  }
  return stats;
}

void save_class_stats(const ClassConditionalStats& stats, const std::string& path) {
  atomic_write_file(path, class_stats_to_text(stats));
}

ClassConditionalStats load_class_stats(const std::string& path) {
  return class_stats_from_text(read_file(path));
}

}  // namespace oodkit
