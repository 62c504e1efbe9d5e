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

#ifndef OODKIT_TENSOR_HPP_
#define OODKIT_TENSOR_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "oodkit/errors.hpp"

namespace oodkit {

using Shape = std::vector<int>;

inline std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (int d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

inline std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

// Dense row-major n-d array. T is float in production; the gradient test
// suite instantiates double to get finite differences below their noise
// floor. `grad` is an optional buffer: empty, or exactly data.size().
template <typename T>
struct TensorT {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;

  TensorT() = default;

  explicit TensorT(Shape s, T fill = T(0)) : shape(std::move(s)) {
    validate_shape();
    data.assign(static_cast<std::size_t>(shape_numel(shape)), fill);
  }

  TensorT(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
    validate_shape();
    if (static_cast<std::int64_t>(data.size()) != shape_numel(shape)) {
      throw DimensionError("tensor data length " + std::to_string(data.size()) +
                           " does not match shape " + shape_str(shape));
    }
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  bool has_grad() const { return !grad.empty(); }
  void alloc_grad() { grad.assign(data.size(), T(0)); }
  void drop_grad() { grad.clear(); }

  T& at(std::int64_t i) { return data[static_cast<std::size_t>(i)]; }
  const T& at(std::int64_t i) const { return data[static_cast<std::size_t>(i)]; }

  // 2-d accessor, row-major.
  T& at(int r, int c) { return data[static_cast<std::size_t>(r) * dim(1) + c]; }
  const T& at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * dim(1) + c];
  }

  // 4-d accessor (batch, height, width, channel).
  T& at(int b, int h, int w, int c) {
    return data[((static_cast<std::size_t>(b) * dim(1) + h) * dim(2) + w) * dim(3) + c];
  }
  const T& at(int b, int h, int w, int c) const {
    return data[((static_cast<std::size_t>(b) * dim(1) + h) * dim(2) + w) * dim(3) + c];
  }

  // Same data, new shape; element count must be preserved.
  TensorT reshaped(Shape new_shape) const {
    if (shape_numel(new_shape) != numel()) {
      throw DimensionError("cannot reshape " + shape_str(shape) + " to " +
                           shape_str(new_shape));
    }
    TensorT out;
    out.shape = std::move(new_shape);
    out.data = data;
    return out;
  }

  bool same_shape(const TensorT& other) const { return shape == other.shape; }

 private:
  void validate_shape() const {
    if (shape.empty()) {
      throw DimensionError("tensor shape must have at least one extent");
    }
    for (int d : shape) {
      if (d <= 0) {
        throw DimensionError("tensor extents must be positive, got " + shape_str(shape));
      }
    }
  }
};

using Tensor = TensorT<float>;

template <typename T>
void check_same_shape(const TensorT<T>& a, const TensorT<T>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + shape_str(a.shape) +
                         " vs " + shape_str(b.shape));
  }
}

// Gathers rows `indices` of a tensor whose first axis is the batch axis.
template <typename T>
TensorT<T> take_rows(const TensorT<T>& t, const std::vector<int>& indices) {
  Shape out_shape = t.shape;
  out_shape[0] = static_cast<int>(indices.size());
  const std::int64_t row = t.numel() / t.dim(0);
  TensorT<T> out(out_shape);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int src = indices[i];
    if (src < 0 || src >= t.dim(0)) {
      throw IndexError("row index " + std::to_string(src) + " out of range");
    }
    std::copy(t.data.begin() + src * row, t.data.begin() + (src + 1) * row,
              out.data.begin() + static_cast<std::int64_t>(i) * row);
  }
  return out;
}

template <typename T, typename U>
TensorT<T> tensor_cast(const TensorT<U>& t) {
  TensorT<T> out;
  out.shape = t.shape;
  out.data.resize(t.data.size());
  for (std::size_t i = 0; i < t.data.size(); ++i) out.data[i] = static_cast<T>(t.data[i]);
  return out;
}

}  // namespace oodkit

#endif  // OODKIT_TENSOR_HPP_
