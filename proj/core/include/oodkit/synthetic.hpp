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

#ifndef OODKIT_SYNTHETIC_HPP_
#define OODKIT_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "oodkit/tensor.hpp"
#include "oodkit/training.hpp"

namespace oodkit {

enum class Modality { image, vector };

const char* modality_name(Modality m);
Modality modality_from_name(const std::string& name);

// Describes one dataset split on disk. Tensor paths are relative to the
// manifest's directory.
struct DatasetManifest {
  std::string name;
  Modality modality = Modality::image;
  Shape shape;  // per-sample: (h, w, c) or (k)
  std::vector<std::string> class_names;
  std::string samples_path;
  std::string labels_path;  // empty for the ood split
  std::string split;        // train | test | ood

  std::string to_text() const;
  static DatasetManifest from_text(const std::string& text);
};

void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// Loads the split's tensors and cross-checks them against the manifest:
// sample shape, label count, [0,1] value range, integral labels.
LabeledBatch load_split(const DatasetManifest& manifest, const std::string& dir);

// Checks manifest/tensor consistency without returning the data.
void validate_split(const DatasetManifest& manifest, const std::string& dir);

enum class SynthMode { shapes, blobs };

const char* synth_mode_name(SynthMode m);
SynthMode synth_mode_from_name(const std::string& name);

// Desk-scale stand-in for the real-image pipelines: procedural glyph images
// or Gaussian blobs in vector space, with held-out kinds as D_out.
struct SyntheticSpec {
  SynthMode mode = SynthMode::shapes;
  int n_classes = 4;
  int samples_per_class = 500;
  int image_size = 32;  // shapes mode; channels fixed at 3
  int vector_dim = 8;   // blobs mode
  double noise = 0.04;  // additive sigma (shapes) / cluster sigma (blobs)
  std::vector<std::string> in_kinds = {"circle", "square", "triangle", "cross"};
  std::vector<std::string> ood_kinds = {"star", "ring"};
  double train_fraction = 0.8;
  std::uint64_t seed = 42;

  void validate() const;
};

struct GeneratedDataset {
  DatasetManifest train;
  DatasetManifest test;
  DatasetManifest ood;
};

// Renders the dataset into out_dir (tensor files + three manifests named
// din_train.json / din_test.json / dout.json) and returns the manifests.
// Deterministic per seed, byte-identical files.
GeneratedDataset generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir);

}  // namespace oodkit

#endif  // OODKIT_SYNTHETIC_HPP_
