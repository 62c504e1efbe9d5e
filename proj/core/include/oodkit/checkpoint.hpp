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

#ifndef OODKIT_CHECKPOINT_HPP_
#define OODKIT_CHECKPOINT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oodkit/tensor.hpp"
#include "oodkit/training.hpp"

namespace oodkit {

// Full training state as named tensors plus a small metadata block.
// The binary layout is: magic "OODC" | version u32=1 | meta u32 length +
// JSON bytes | count u32 | index (name length u32, name, record size u64)
// per tensor | concatenated tensor records (each the tensor file format).
struct CheckpointData {
  std::uint64_t iteration = 0;
  std::string rng_state;
  std::map<std::string, std::uint64_t> adam_steps;        // per model name
  std::vector<std::pair<std::string, Tensor>> tensors;    // ordered, unique names
};

std::string checkpoint_to_bytes(const CheckpointData& data);
CheckpointData checkpoint_from_bytes(const std::string& bytes);

void save_checkpoint_data(const CheckpointData& data, const std::string& path);
CheckpointData load_checkpoint_data(const std::string& path);

// Snapshot of a trainer: model parameters and buffers, Adam moments, the
// iteration counter and the training rng stream. Resuming from the snapshot
// continues bitwise identically to the uninterrupted run.
CheckpointData trainer_checkpoint(const Trainer& trainer);

// Restores a snapshot into a freshly constructed trainer with matching
// specs. Missing tensors or shape mismatches raise CheckpointError naming
// the tensor.
void apply_checkpoint(Trainer& trainer, const CheckpointData& data);

void save_checkpoint(const Trainer& trainer, const std::string& path);
void load_checkpoint(Trainer& trainer, const std::string& path);

}  // namespace oodkit

#endif  // OODKIT_CHECKPOINT_HPP_
