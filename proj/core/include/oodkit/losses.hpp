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

#ifndef OODKIT_LOSSES_HPP_
#define OODKIT_LOSSES_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "oodkit/errors.hpp"
#include "oodkit/tensor.hpp"

namespace oodkit {

// Probability clamps. BCE sees raw sigmoid outputs which saturate easily;
// CE/KL see softmax outputs which are strictly positive by construction.
constexpr double kBceClamp = 1e-7;
constexpr double kProbClamp = 1e-12;

// All losses reduce with the batch mean, so hyperparameters are independent
// of batch size. The *_grad functions return the exact derivative of the
// clamped value actually computed (zero in clamped regions).

// Mean binary cross-entropy of probabilities `pred` against a {0,1} tensor.
template <typename T>
double bce(const TensorT<T>& pred, const TensorT<T>& target) {
  check_same_shape(pred, target, "bce");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    double p = pred.data[i];
    p = std::min(std::max(p, kBceClamp), 1.0 - kBceClamp);
    const double t = target.data[i];
    sum += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
  }
  return sum / static_cast<double>(pred.data.size());
}

template <typename T>
TensorT<T> bce_grad(const TensorT<T>& pred, const TensorT<T>& target) {
  check_same_shape(pred, target, "bce");
  TensorT<T> grad(pred.shape);
  const double inv_n = 1.0 / static_cast<double>(pred.data.size());
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double p = pred.data[i];
    if (p <= kBceClamp || p >= 1.0 - kBceClamp) continue;  // clamped: flat
    const double t = target.data[i];
    grad.data[i] = static_cast<T>((-t / p + (1.0 - t) / (1.0 - p)) * inv_n);
  }
  return grad;
}

// Constant-target convenience (the GAN losses only ever use all-ones or
// all-zeros targets).
template <typename T>
TensorT<T> const_target(const TensorT<T>& like, double value) {
  TensorT<T> t(like.shape, static_cast<T>(value));
  return t;
}

// Mean cross-entropy -log p[label] over softmax rows.
template <typename T>
double ce_loss(const TensorT<T>& probs, const std::vector<int>& labels) {
  if (probs.rank() != 2) throw DimensionError("ce_loss expects (batch, classes) probs");
  const int batch = probs.dim(0), classes = probs.dim(1);
  if (static_cast<int>(labels.size()) != batch) {
    throw DimensionError("ce_loss: label count does not match batch");
  }
  double sum = 0.0;
  for (int b = 0; b < batch; ++b) {
    const int label = labels[static_cast<std::size_t>(b)];
    if (label < 0 || label >= classes) {
      throw IndexError("ce_loss: label " + std::to_string(label) + " outside [0, " +
                       std::to_string(classes) + ")");
    }
    const double p = std::max<double>(probs.at(b, label), kProbClamp);
    sum += -std::log(p);
  }
  return sum / batch;
}

template <typename T>
TensorT<T> ce_loss_grad(const TensorT<T>& probs, const std::vector<int>& labels) {
  const int batch = probs.dim(0);
  TensorT<T> grad(probs.shape);
  for (int b = 0; b < batch; ++b) {
    const int label = labels[static_cast<std::size_t>(b)];
    const double p = probs.at(b, label);
    if (p > kProbClamp) {
      grad.at(b, label) = static_cast<T>(-1.0 / (p * batch));
    }
  }
  return grad;
}

// Mean KL divergence of softmax rows from the uniform distribution over n_c
// classes: sum_i p_i log(p_i * n_c), zero-probability terms contribute 0.
template <typename T>
double kl_to_uniform(const TensorT<T>& probs, int n_classes) {
  if (probs.rank() != 2 || probs.dim(1) != n_classes) {
    throw DimensionError("kl_to_uniform: probs width " +
                         (probs.rank() == 2 ? std::to_string(probs.dim(1)) : shape_str(probs.shape)) +
                         " does not match n_classes " + std::to_string(n_classes));
  }
  const int batch = probs.dim(0);
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.data.size(); ++i) {
    const double p = probs.data[i];
    const double p_safe = std::max(p, kProbClamp);
    sum += p * std::log(p_safe * n_classes);
  }
  return sum / batch;
}

template <typename T>
TensorT<T> kl_to_uniform_grad(const TensorT<T>& probs, int n_classes) {
  if (probs.rank() != 2 || probs.dim(1) != n_classes) {
    throw DimensionError("kl_to_uniform: probs width does not match n_classes");
  }
  const int batch = probs.dim(0);
  TensorT<T> grad(probs.shape);
  const double inv_b = 1.0 / batch;
  for (std::size_t i = 0; i < probs.data.size(); ++i) {
    const double p = probs.data[i];
    if (p > kProbClamp) {
      grad.data[i] = static_cast<T>((std::log(p * n_classes) + 1.0) * inv_b);
    } else {
      // Below the clamp the log factor is frozen; d/dp of p*log(clamp*n).
      grad.data[i] = static_cast<T>(std::log(kProbClamp * n_classes) * inv_b);
    }
  }
  return grad;
}

// Discriminator loss: BCE(dis(real), 1) + BCE(dis(fake), 0).
template <typename T>
double loss_d(const TensorT<T>& dis_real, const TensorT<T>& dis_fake) {
  return bce(dis_real, const_target(dis_real, 1.0)) +
         bce(dis_fake, const_target(dis_fake, 0.0));
}

// Generator loss: BCE(dis(fake), 1) + KL(cls(fake) || uniform).
template <typename T>
double loss_g(const TensorT<T>& dis_fake, const TensorT<T>& cls_fake, int n_classes) {
  return bce(dis_fake, const_target(dis_fake, 1.0)) + kl_to_uniform(cls_fake, n_classes);
}

// Classifier loss: CE(cls(real), labels) + KL(cls(fake) || uniform).
template <typename T>
double loss_cls(const TensorT<T>& cls_real, const std::vector<int>& labels,
                const TensorT<T>& cls_fake, int n_classes) {
  return ce_loss(cls_real, labels) + kl_to_uniform(cls_fake, n_classes);
}

}  // namespace oodkit

#endif  // OODKIT_LOSSES_HPP_
