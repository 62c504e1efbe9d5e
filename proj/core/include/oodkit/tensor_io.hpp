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

#ifndef OODKIT_TENSOR_IO_HPP_
#define OODKIT_TENSOR_IO_HPP_

#include <string>

#include "oodkit/tensor.hpp"

namespace oodkit {

// Binary tensor file, bit-exact round trip:
//   magic "OODT" | version u32=1 | dtype u8=1 (f32) | rank u32 |
//   dims u32[rank] | payload f32[numel]
// all little-endian, payload row-major. Malformed input raises FormatError
// carrying the byte offset of the first defect.

std::string tensor_to_bytes(const Tensor& t);
Tensor tensor_from_bytes(const std::string& bytes);

void write_tensor_file(const Tensor& t, const std::string& path);
Tensor read_tensor_file(const std::string& path);

}  // namespace oodkit

#endif  // OODKIT_TENSOR_IO_HPP_
