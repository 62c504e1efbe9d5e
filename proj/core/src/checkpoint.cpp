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

#include "oodkit/checkpoint.hpp"

#include <cstring>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "oodkit/errors.hpp"
#include "oodkit/fsio.hpp"
#include "oodkit/tensor_io.hpp"

namespace oodkit {

namespace {

constexpr char kMagic[4] = {'O', 'O', 'D', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& bytes;
  std::uint64_t offset = 0;

  void need(std::uint64_t n, const char* what) const {
    if (offset + n > bytes.size()) {
      throw FormatError(std::string("truncated checkpoint while reading ") + what, offset);
    }
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
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<std::uint8_t>(bytes[static_cast<std::size_t>(offset + i)]))
           << (8 * i);
    }
    offset += 8;
    return v;
  }
  std::string take(std::uint64_t n, const char* what) {
    need(n, what);
    std::string s = bytes.substr(static_cast<std::size_t>(offset), static_cast<std::size_t>(n));
    offset += n;
    return s;
  }
};

}  // namespace

std::string checkpoint_to_bytes(const CheckpointData& data) {
  std::set<std::string> seen;
  for (const auto& [name, tensor] : data.tensors) {
    (void)tensor;
    if (!seen.insert(name).second) {
      throw CheckpointError("duplicate tensor name '" + name + "'");
    }
  }

  nlohmann::json meta;
  meta["iteration"] = data.iteration;
  meta["rng"] = data.rng_state;
  meta["adam_steps"] = data.adam_steps;
  const std::string meta_text = meta.dump();

  std::vector<std::string> records;
  records.reserve(data.tensors.size());
  for (const auto& [name, tensor] : data.tensors) {
    (void)name;
    records.push_back(tensor_to_bytes(tensor));
  }

  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(meta_text.size()));
  out += meta_text;
  put_u32(out, static_cast<std::uint32_t>(data.tensors.size()));
  for (std::size_t i = 0; i < data.tensors.size(); ++i) {
    const std::string& name = data.tensors[i].first;
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u64(out, records[i].size());
  }
  for (const std::string& record : records) out += record;
  return out;
}

CheckpointData checkpoint_from_bytes(const std::string& bytes) {
  Reader r{bytes};
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic, expected \"OODC\"", 0);
  }
  r.offset = 4;
  const std::uint64_t version_at = r.offset;
  const std::uint32_t version = r.u32("version");
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version),
                      version_at);
  }
  const std::uint32_t meta_len = r.u32("meta length");
  const std::uint64_t meta_at = r.offset;
  const std::string meta_text = r.take(meta_len, "meta");

  CheckpointData data;
  try {
    const nlohmann::json meta = nlohmann::json::parse(meta_text);
    data.iteration = meta.at("iteration").get<std::uint64_t>();
    data.rng_state = meta.at("rng").get<std::string>();
    data.adam_steps = meta.at("adam_steps").get<std::map<std::string, std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint metadata: ") + e.what(), meta_at);
  }

  const std::uint32_t count = r.u32("tensor count");
  std::vector<std::pair<std::string, std::uint64_t>> index;
  index.reserve(count);
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = r.u32("name length");
    const std::string name = r.take(name_len, "name");
    const std::uint64_t size = r.u64("record size");
    if (!seen.insert(name).second) {
      throw CheckpointError("duplicate tensor name '" + name + "' in checkpoint");
    }
    index.emplace_back(name, size);
  }
  for (const auto& [name, size] : index) {
    const std::uint64_t record_at = r.offset;
    const std::string record = r.take(size, "tensor record");
    try {
      data.tensors.emplace_back(name, tensor_from_bytes(record));
    } catch (const FormatError& e) {
      throw FormatError("tensor '" + name + "': " + e.what(), record_at + e.byte_offset());
    }
  }
  if (r.offset != bytes.size()) {
    throw FormatError("trailing bytes after checkpoint records", r.offset);
  }
  return data;
}

void save_checkpoint_data(const CheckpointData& data, const std::string& path) {
  atomic_write_file(path, checkpoint_to_bytes(data));
}

CheckpointData load_checkpoint_data(const std::string& path) {
  return checkpoint_from_bytes(read_file(path));
}

namespace {

void collect_model(const std::string& model_name, const Model& model,
                   const AdamState& opt, CheckpointData& data) {
  model.for_each_param([&](const std::string& name, const Tensor& t) {
    data.tensors.emplace_back(model_name + "." + name, t);
  });
  model.for_each_buffer([&](const std::string& name, const Tensor& t) {
    data.tensors.emplace_back(model_name + "." + name, t);
  });
  for (std::size_t k = 0; k < opt.m.size(); ++k) {
    data.tensors.emplace_back(model_name + ".adam.m." + std::to_string(k), opt.m[k]);
    data.tensors.emplace_back(model_name + ".adam.v." + std::to_string(k), opt.v[k]);
  }
  data.adam_steps[model_name] = opt.t;
}

void restore_model(const std::string& model_name, Model& model, AdamState& opt,
                   const std::unordered_map<std::string, const Tensor*>& by_name,
                   const CheckpointData& data, std::set<std::string>& consumed) {
  auto fetch = [&](const std::string& name) -> const Tensor& {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw CheckpointError("checkpoint is missing tensor '" + name + "'");
    }
    consumed.insert(name);
    return *it->second;
  };
  auto assign = [&](const std::string& name, Tensor& dst) {
    const Tensor& src = fetch(name);
    if (src.shape != dst.shape) {
      throw DimensionError("checkpoint tensor '" + name + "' has shape " +
                           shape_str(src.shape) + ", model expects " + shape_str(dst.shape));
    }
    dst.data = src.data;
  };
  model.for_each_param([&](const std::string& name, Tensor& t) {
    assign(model_name + "." + name, t);
  });
  model.for_each_buffer([&](const std::string& name, Tensor& t) {
    assign(model_name + "." + name, t);
  });
  for (std::size_t k = 0; k < opt.m.size(); ++k) {
    assign(model_name + ".adam.m." + std::to_string(k), opt.m[k]);
    assign(model_name + ".adam.v." + std::to_string(k), opt.v[k]);
  }
  const auto it = data.adam_steps.find(model_name);
  if (it == data.adam_steps.end()) {
    throw CheckpointError("checkpoint is missing optimizer step count for '" +
                          model_name + "'");
  }
  opt.t = it->second;
}

}  // namespace

CheckpointData trainer_checkpoint(const Trainer& trainer) {
  CheckpointData data;
  data.iteration = trainer.iteration();
  data.rng_state = trainer.train_rng().serialize();
  collect_model("cls", trainer.cls(), trainer.cls_opt(), data);
  if (trainer.config().mode == TrainMode::joint) {
    collect_model("gen", trainer.gen(), trainer.gen_opt(), data);
    collect_model("dis", trainer.dis(), trainer.dis_opt(), data);
  }
  return data;
}

void apply_checkpoint(Trainer& trainer, const CheckpointData& data) {
  std::unordered_map<std::string, const Tensor*> by_name;
  by_name.reserve(data.tensors.size());
  for (const auto& [name, tensor] : data.tensors) {
    if (!by_name.emplace(name, &tensor).second) {
      throw CheckpointError("duplicate tensor name '" + name + "' in checkpoint");
    }
  }
  std::set<std::string> consumed;
  restore_model("cls", trainer.cls(), trainer.cls_opt(), by_name, data, consumed);
  if (trainer.config().mode == TrainMode::joint) {
    restore_model("gen", trainer.gen(), trainer.gen_opt(), by_name, data, consumed);
    restore_model("dis", trainer.dis(), trainer.dis_opt(), by_name, data, consumed);
  }
  for (const auto& [name, tensor] : data.tensors) {
    (void)tensor;
    if (!consumed.count(name)) {
      throw CheckpointError("checkpoint tensor '" + name +
                            "' has no destination in this trainer");
    }
  }
  trainer.set_iteration(data.iteration);
  trainer.train_rng().deserialize(data.rng_state);
}

void save_checkpoint(const Trainer& trainer, const std::string& path) {
  save_checkpoint_data(trainer_checkpoint(trainer), path);
}

void load_checkpoint(Trainer& trainer, const std::string& path) {
  apply_checkpoint(trainer, load_checkpoint_data(path));
}

}  // namespace oodkit
