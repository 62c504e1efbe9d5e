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

#include "oodkit/tensor_io.hpp"

#include <cstring>

#include "oodkit/errors.hpp"
#include "oodkit/fsio.hpp"

namespace oodkit {

namespace {

constexpr char kMagic[4] = {'O', 'O', 'D', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kDtypeF32 = 1;
constexpr std::uint32_t kMaxRank = 16;

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32(out, v);
}

// Offset-tracking reader so format errors can name the defective byte.
struct Reader {
  const std::string& bytes;
  std::uint64_t offset = 0;

  void need(std::uint64_t n, const char* what) const {
    if (offset + n > bytes.size()) {
      throw FormatError(std::string("truncated tensor file while reading ") + what, offset);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes[static_cast<std::size_t>(offset++)]);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(
               static_cast<std::uint8_t>(bytes[static_cast<std::size_t>(offset + i)]))
           << (8 * i);
    }
    offset += 4;
    return v;
  }
  float f32(const char* what) {
    const std::uint32_t v = u32(what);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
  }
};

}  // namespace

std::string tensor_to_bytes(const Tensor& t) {
  std::string out;
  out.reserve(13 + 4 * t.shape.size() + 4 * t.data.size());
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  out.push_back(static_cast<char>(kDtypeF32));
  put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
  for (int d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
  for (float v : t.data) put_f32(out, v);
  return out;
}

Tensor tensor_from_bytes(const std::string& bytes) {
  Reader r{bytes};
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic, expected \"OODT\"", 0);
  }
  r.offset = 4;
  const std::uint64_t version_at = r.offset;
  const std::uint32_t version = r.u32("version");
  if (version != kVersion) {
    throw FormatError("unsupported version " + std::to_string(version), version_at);
  }
  const std::uint64_t dtype_at = r.offset;
  const std::uint8_t dtype = r.u8("dtype");
  if (dtype != kDtypeF32) {
    throw FormatError("unsupported dtype " + std::to_string(dtype), dtype_at);
  }
  const std::uint64_t rank_at = r.offset;
  const std::uint32_t rank = r.u32("rank");
  if (rank == 0 || rank > kMaxRank) {
    throw FormatError("rank " + std::to_string(rank) + " outside [1, " +
                          std::to_string(kMaxRank) + "]",
                      rank_at);
  }
  Shape shape;
  shape.reserve(rank);
  std::int64_t numel = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint64_t dim_at = r.offset;
    const std::uint32_t d = r.u32("dims");
    if (d == 0 || d > 0x7fffffffu) {
      throw FormatError("dimension " + std::to_string(i) + " is invalid", dim_at);
    }
    numel *= d;
    if (numel > (std::int64_t{1} << 34)) {
      throw FormatError("tensor too large", dim_at);
    }
    shape.push_back(static_cast<int>(d));
  }
  r.need(4 * static_cast<std::uint64_t>(numel), "payload");
  Tensor t(shape);
  for (std::int64_t i = 0; i < numel; ++i) t.at(i) = r.f32("payload");
  if (r.offset != bytes.size()) {
    throw FormatError("trailing bytes after payload", r.offset);
  }
  return t;
}

void write_tensor_file(const Tensor& t, const std::string& path) {
  atomic_write_file(path, tensor_to_bytes(t));
}

Tensor read_tensor_file(const std::string& path) { return tensor_from_bytes(read_file(path)); }

}  // namespace oodkit
