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

#include "config.hpp"

#include <json.hpp>

#include "oodkit/errors.hpp"
#include "oodkit/fsio.hpp"

namespace oodkit::cli {

namespace {

using nlohmann::json;

json default_config_json() {
  // Desk-scale defaults: a full gen-data -> train -> fit-stats -> eval
  // pipeline on these settings stays within minutes-scale CPU budgets.
  return json{
      {"dataset",
       {{"mode", "shapes"},
        {"n_classes", 4},
        {"samples_per_class", 500},
        {"image_size", 32},
        {"vector_dim", 8},
        {"noise", 0.04},
        {"in_kinds", {"circle", "square", "triangle", "cross"}},
        {"ood_kinds", {"star", "ring"}},
        {"train_fraction", 0.8}}},
      {"model",
       {{"noise_dim", 100},
        {"cls_channels", {16, 32}},
        {"cls_dense", 64},
        {"cls_dropout", 0.3},
        {"dis_channels", {16, 32}},
        {"dis_dropout", 0.3},
        {"gen_base_channels", 64},
        {"gen_channels", {32, 16}},
        {"leaky_alpha", 0.2},
        {"mlp_hidden", {64, 64}}}},
      {"train",
       {{"lr0", 2e-4},
        {"decay_every", 30000},
        {"decay_rate", 0.5},
        {"epochs", 12},
        {"batch_size", 128}}},
      {"posthoc", {{"epsilon", -1.0}, {"mc_passes", 100}}},
  };
}

void merge_into(json& base, const json& extra, const std::string& where) {
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!base.contains(it.key())) {
      throw InvalidSpecError("config: unknown key '" + where + it.key() + "'");
    }
    if (it.value().is_object()) {
      merge_into(base[it.key()], it.value(), where + it.key() + ".");
    } else {
      base[it.key()] = it.value();
    }
  }
}

void apply_override(json& base, const std::string& kv) {
  const std::size_t eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError("--set expects section.key=value, got '" + kv + "'");
  }
  const std::string path = kv.substr(0, eq);
  const std::string raw = kv.substr(eq + 1);

  json* node = &base;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (!node->contains(key)) {
      throw UsageError("--set: unknown config key '" + path + "'");
    }
    if (dot == std::string::npos) {
      json value;
      try {
        value = json::parse(raw);
      } catch (const json::exception&) {
        value = raw;  // plain string
      }
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    begin = dot + 1;
  }
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidSpecError("config: bad value for '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace

void RunConfig::finalize() {
  model.n_classes = dataset.n_classes;
  if (dataset.mode == SynthMode::shapes) {
    model.input_shape = {dataset.image_size, dataset.image_size, 3};
  } else {
    model.input_shape = {dataset.vector_dim};
  }
}

RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::string>& overrides, std::uint64_t seed) {
  json doc = default_config_json();
  if (!config_path.empty()) {
    json file;
    try {
      file = json::parse(read_file(config_path));
    } catch (const json::exception& e) {
      throw FormatError("config '" + config_path + "' is not valid JSON: " + e.what(), 0);
    }
    merge_into(doc, file, "");
  }
  for (const std::string& kv : overrides) apply_override(doc, kv);

  RunConfig config;
  const json& d = doc.at("dataset");
  config.dataset.mode = synth_mode_from_name(get<std::string>(d, "mode"));
  config.dataset.n_classes = get<int>(d, "n_classes");
  config.dataset.samples_per_class = get<int>(d, "samples_per_class");
  config.dataset.image_size = get<int>(d, "image_size");
  config.dataset.vector_dim = get<int>(d, "vector_dim");
  config.dataset.noise = get<double>(d, "noise");
  config.dataset.in_kinds = get<std::vector<std::string>>(d, "in_kinds");
  config.dataset.ood_kinds = get<std::vector<std::string>>(d, "ood_kinds");
  config.dataset.train_fraction = get<double>(d, "train_fraction");
  config.dataset.seed = seed;

  const json& m = doc.at("model");
  config.model.noise_dim = get<int>(m, "noise_dim");
  config.model.cls_channels = get<std::vector<int>>(m, "cls_channels");
  config.model.cls_dense = get<int>(m, "cls_dense");
  config.model.cls_dropout = get<double>(m, "cls_dropout");
  config.model.dis_channels = get<std::vector<int>>(m, "dis_channels");
  config.model.dis_dropout = get<double>(m, "dis_dropout");
  config.model.gen_base_channels = get<int>(m, "gen_base_channels");
  config.model.gen_channels = get<std::vector<int>>(m, "gen_channels");
  config.model.leaky_alpha = get<double>(m, "leaky_alpha");
  config.model.mlp_hidden = get<std::vector<int>>(m, "mlp_hidden");

  const json& t = doc.at("train");
  config.train.lr0 = get<double>(t, "lr0");
  config.train.decay_every = get<std::uint64_t>(t, "decay_every");
  config.train.decay_rate = get<double>(t, "decay_rate");
  config.train.epochs = get<int>(t, "epochs");
  config.train.batch_size = get<int>(t, "batch_size");

  const json& p = doc.at("posthoc");
  config.epsilon = get<double>(p, "epsilon");
  config.mc_passes = get<int>(p, "mc_passes");

  config.finalize();
  return config;
}

}  // namespace oodkit::cli
