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

#ifndef OODKIT_ERRORS_HPP_
#define OODKIT_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace oodkit {

// Root of all oodkit exceptions. Every failure the library reports derives
// from this so callers can catch one type at the CLI boundary.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/layer shape disagreements.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed layer or model specifications.
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

// Operation invoked on an object in the wrong state (e.g. backward on an
// inference trace).
class StateError : public Error {
 public:
  using Error::Error;
};

// Out-of-range class label or index.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Numerical routine failed to converge or produced a non-finite result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Degenerate input (zero-norm vector and the like).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Too few samples to fit the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Empty population where at least one element is required.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Model lacks a structural prerequisite (e.g. no dropout layer for MC-MI).
class InvalidModelError : public Error {
 public:
  using Error::Error;
};

// Training aborted on a non-finite loss. Carries the iteration index.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& msg, std::uint64_t iteration)
      : Error(msg + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::uint64_t iteration() const { return iteration_; }

 private:
  std::uint64_t iteration_;
};

// Malformed binary file. Carries the byte offset of the first defect.
class FormatError : public Error {
 public:
  FormatError(const std::string& msg, std::uint64_t byte_offset)
      : Error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

// Checkpoint-level inconsistency (name collision, missing tensor, ...).
class CheckpointError : public Error {
 public:
  using Error::Error;
};

// File system failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Command line misuse.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace oodkit

#endif  // OODKIT_ERRORS_HPP_
