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

#include "oodkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "oodkit/errors.hpp"
#include "oodkit/fsio.hpp"
#include "oodkit/rng.hpp"
#include "oodkit/tensor_io.hpp"

namespace oodkit {

const char* modality_name(Modality m) { return m == Modality::image ? "image" : "vector"; }

Modality modality_from_name(const std::string& name) {
  if (name == "image") return Modality::image;
  if (name == "vector") return Modality::vector;
  throw InvalidSpecError("unknown modality '" + name + "'");
}

const char* synth_mode_name(SynthMode m) { return m == SynthMode::shapes ? "shapes" : "blobs"; }

SynthMode synth_mode_from_name(const std::string& name) {
  if (name == "shapes") return SynthMode::shapes;
  if (name == "blobs") return SynthMode::blobs;
  throw InvalidSpecError("unknown synthetic mode '" + name + "'");
}

std::string DatasetManifest::to_text() const {
  nlohmann::json doc;
  doc["name"] = name;
  doc["modality"] = modality_name(modality);
  doc["shape"] = shape;
  doc["class_names"] = class_names;
  doc["samples_path"] = samples_path;
  doc["labels_path"] = labels_path;
  doc["split"] = split;
  return doc.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what(), 0);
  }
  DatasetManifest m;
  try {
    m.name = doc.at("name").get<std::string>();
    m.modality = modality_from_name(doc.at("modality").get<std::string>());
    m.shape = doc.at("shape").get<Shape>();
    m.class_names = doc.at("class_names").get<std::vector<std::string>>();
    m.samples_path = doc.at("samples_path").get<std::string>();
    m.labels_path = doc.at("labels_path").get<std::string>();
    m.split = doc.at("split").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest is missing a required key: ") + e.what(), 0);
  }
  if (m.split != "train" && m.split != "test" && m.split != "ood") {
    throw FormatError("manifest split must be train|test|ood, got '" + m.split + "'", 0);
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  atomic_write_file(path, manifest.to_text());
}

DatasetManifest load_manifest(const std::string& path) {
  return DatasetManifest::from_text(read_file(path));
}

namespace {

std::string join_path(const std::string& dir, const std::string& rel) {
  if (dir.empty()) return rel;
  return (std::filesystem::path(dir) / rel).string();
}

}  // namespace

LabeledBatch load_split(const DatasetManifest& manifest, const std::string& dir) {
  LabeledBatch batch;
  batch.inputs = read_tensor_file(join_path(dir, manifest.samples_path));
  batch.origin = manifest.split == "ood" ? Origin::out_dist : Origin::in_dist;

  Shape expected = manifest.shape;
  expected.insert(expected.begin(), batch.inputs.dim(0));
  if (batch.inputs.shape != expected) {
    throw DimensionError("samples tensor shape " + shape_str(batch.inputs.shape) +
                         " does not match manifest shape " + shape_str(manifest.shape));
  }
  for (float v : batch.inputs.data) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw DomainError("dataset '" + manifest.name + "' has values outside [0, 1]");
    }
  }

  if (!manifest.labels_path.empty()) {
    const Tensor labels = read_tensor_file(join_path(dir, manifest.labels_path));
    if (labels.rank() != 1 || labels.dim(0) != batch.inputs.dim(0)) {
      throw DimensionError("labels tensor length does not match sample count");
    }
    const int n_classes = static_cast<int>(manifest.class_names.size());
    batch.labels.reserve(static_cast<std::size_t>(labels.dim(0)));
    for (float v : labels.data) {
      const int label = static_cast<int>(v);
      if (static_cast<float>(label) != v || label < 0 || label >= n_classes) {
        throw DomainError("label value " + std::to_string(v) + " is not a valid class id");
      }
      batch.labels.push_back(label);
    }
  } else if (manifest.split != "ood") {
    throw FormatError("non-ood manifest must reference a labels tensor", 0);
  }
  return batch;
}

void validate_split(const DatasetManifest& manifest, const std::string& dir) {
  (void)load_split(manifest, dir);
}

void SyntheticSpec::validate() const {
  if (n_classes < 2) throw InvalidSpecError("synthetic: n_classes must be >= 2");
  if (samples_per_class < 2) {
    throw InvalidSpecError("synthetic: samples_per_class must be >= 2");
  }
  if (!(noise >= 0.0)) throw InvalidSpecError("synthetic: noise must be >= 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidSpecError("synthetic: train_fraction must be in (0, 1)");
  }
  std::set<std::string> in_set(in_kinds.begin(), in_kinds.end());
  for (const std::string& kind : ood_kinds) {
    if (in_set.count(kind)) {
      throw InvalidSpecError("synthetic: kind '" + kind + "' is both in-class and OOD");
    }
  }
  if (mode == SynthMode::shapes) {
    if (image_size < 8) throw InvalidSpecError("synthetic: image_size must be >= 8");
    if (static_cast<int>(in_kinds.size()) != n_classes) {
      throw InvalidSpecError("synthetic: need one in-class kind per class");
    }
    if (ood_kinds.empty()) throw InvalidSpecError("synthetic: need at least one OOD kind");
  } else {
    if (vector_dim < 1) throw InvalidSpecError("synthetic: vector_dim must be >= 1");
  }
}

namespace {

// --- shapes mode -----------------------------------------------------------

enum class Glyph { circle, square, triangle, cross, star, ring };

Glyph glyph_from_name(const std::string& name) {
  if (name == "circle") return Glyph::circle;
  if (name == "square") return Glyph::square;
  if (name == "triangle") return Glyph::triangle;
  if (name == "cross") return Glyph::cross;
  if (name == "star") return Glyph::star;
  if (name == "ring") return Glyph::ring;
  throw InvalidSpecError("unknown shape kind '" + name +
                         "' (expected circle|square|triangle|cross|star|ring)");
}

bool glyph_covers(Glyph glyph, double x, double y, double r) {
  const double ax = std::fabs(x), ay = std::fabs(y);
  switch (glyph) {
    case Glyph::circle:
      return x * x + y * y <= r * r;
    case Glyph::square:
      return ax <= 0.82 * r && ay <= 0.82 * r;
    case Glyph::triangle: {
      // Upward triangle: apex (0, -r), base y = 0.72 r.
      if (y > 0.72 * r || y < -r) return false;
      const double half_width = 0.95 * r * (y + r) / (1.72 * r);
      return ax <= half_width;
    }
    case Glyph::cross:
      return (ax <= 0.30 * r && ay <= r) || (ay <= 0.30 * r && ax <= r);
    case Glyph::star:
      // Four-pointed concave star (astroid).
      return std::sqrt(ax) + std::sqrt(ay) <= std::sqrt(r);
    case Glyph::ring: {
      const double d2 = x * x + y * y;
      return d2 <= r * r && d2 >= (0.55 * r) * (0.55 * r);
    }
  }
  return false;
}

void render_glyph(Glyph glyph, int size, double sigma, Rng& rng, float* pixels) {
  const double cx = 0.5 * size + rng.uniform(-0.15, 0.15) * size;
  const double cy = 0.5 * size + rng.uniform(-0.15, 0.15) * size;
  const double r = rng.uniform(0.26, 0.40) * size;
  // One dominant random color per sample; classes are separated by shape,
  // not by color.
  double color[3];
  for (double& c : color) c = rng.uniform(0.45, 1.0);
  const double background = 0.08;

  for (int py = 0; py < size; ++py) {
    for (int px = 0; px < size; ++px) {
      const bool inside = glyph_covers(glyph, px + 0.5 - cx, py + 0.5 - cy, r);
      for (int ch = 0; ch < 3; ++ch) {
        double v = inside ? color[ch] : background;
        if (sigma > 0.0) v += sigma * rng.normal();
        v = std::clamp(v, 0.0, 1.0);
        pixels[(static_cast<std::size_t>(py) * size + px) * 3 + ch] = static_cast<float>(v);
      }
    }
  }
}

// --- blobs mode --------------------------------------------------------------

std::vector<std::vector<double>> blob_means(const SyntheticSpec& spec, Rng& rng) {
  const int k = spec.vector_dim;
  std::vector<std::vector<double>> means;
  const int n_ood = std::max<int>(1, static_cast<int>(spec.ood_kinds.size()));
  const double min_gap = 6.0 * spec.noise;

  // In-class means first, then OOD means displaced >= 6 sigma from every
  // in-class mean. Rejection sampling inside [0.2, 0.8]^k.
  for (int c = 0; c < spec.n_classes + n_ood; ++c) {
    const bool is_ood = c >= spec.n_classes;
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      std::vector<double> candidate(static_cast<std::size_t>(k));
      for (double& v : candidate) v = rng.uniform(0.2, 0.8);
      placed = true;
      for (std::size_t other = 0; other < means.size(); ++other) {
        double d2 = 0.0;
        for (int j = 0; j < k; ++j) {
          const double diff = candidate[static_cast<std::size_t>(j)] - means[other][static_cast<std::size_t>(j)];
          d2 += diff * diff;
        }
        // Every cluster pair keeps a 6-sigma gap, which in particular
        // displaces each OOD cluster >= 6 sigma from every in-class mean.
        if (std::sqrt(d2) < min_gap) {
          placed = false;
          break;
        }
      }
      (void)is_ood;
      if (placed) means.push_back(std::move(candidate));
    }
    if (!placed) {
      throw NumericalError("blob means: could not place cluster " + std::to_string(c) +
                           " with 6-sigma separation; lower the noise level");
    }
  }
  return means;
}

struct SplitBuffers {
  std::vector<float> samples;
  std::vector<float> labels;
  int count = 0;
};

void append_sample(SplitBuffers& buf, const float* values, std::int64_t n, int label) {
  buf.samples.insert(buf.samples.end(), values, values + n);
  if (label >= 0) buf.labels.push_back(static_cast<float>(label));
  buf.count += 1;
}

DatasetManifest write_split(const std::string& out_dir, const std::string& base_name,
                            const std::string& split, const SyntheticSpec& spec,
                            const Shape& sample_shape,
                            const std::vector<std::string>& class_names,
                            const SplitBuffers& buf) {
  DatasetManifest manifest;
  manifest.name = base_name + "_" + split;
  manifest.modality = spec.mode == SynthMode::shapes ? Modality::image : Modality::vector;
  manifest.shape = sample_shape;
  manifest.class_names = class_names;
  manifest.split = split;
  manifest.samples_path = base_name + "_" + split + "_samples.oodt";
  Shape full = sample_shape;
  full.insert(full.begin(), buf.count);
  write_tensor_file(Tensor(full, buf.samples), join_path(out_dir, manifest.samples_path));
  if (!buf.labels.empty()) {
    manifest.labels_path = base_name + "_" + split + "_labels.oodt";
    write_tensor_file(Tensor(Shape{buf.count}, buf.labels),
                      join_path(out_dir, manifest.labels_path));
  }
  return manifest;
}

}  // namespace

GeneratedDataset generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);

  const std::string base_name =
      spec.mode == SynthMode::shapes ? "shapes" : "blobs";
  Shape sample_shape = spec.mode == SynthMode::shapes
                           ? Shape{spec.image_size, spec.image_size, 3}
                           : Shape{spec.vector_dim};
  const std::int64_t sample_numel = shape_numel(sample_shape);

  SplitBuffers train, test, ood;
  std::vector<float> scratch(static_cast<std::size_t>(sample_numel));

  const int train_per_class =
      static_cast<int>(std::floor(spec.train_fraction * spec.samples_per_class));

  if (spec.mode == SynthMode::shapes) {
    for (int c = 0; c < spec.n_classes; ++c) {
      const Glyph glyph = glyph_from_name(spec.in_kinds[static_cast<std::size_t>(c)]);
      Rng rng = derived_rng(spec.seed, 100 + static_cast<std::uint64_t>(c));
      for (int i = 0; i < spec.samples_per_class; ++i) {
        render_glyph(glyph, spec.image_size, spec.noise, rng, scratch.data());
        append_sample(i < train_per_class ? train : test, scratch.data(), sample_numel, c);
      }
    }
    for (std::size_t k = 0; k < spec.ood_kinds.size(); ++k) {
      const Glyph glyph = glyph_from_name(spec.ood_kinds[k]);
      Rng rng = derived_rng(spec.seed, 500 + static_cast<std::uint64_t>(k));
      for (int i = 0; i < spec.samples_per_class; ++i) {
        render_glyph(glyph, spec.image_size, spec.noise, rng, scratch.data());
        append_sample(ood, scratch.data(), sample_numel, -1);
      }
    }
  } else {
    Rng mean_rng = derived_rng(spec.seed, 7);
    const auto means = blob_means(spec, mean_rng);
    const int n_ood = std::max<int>(1, static_cast<int>(spec.ood_kinds.size()));
    for (int c = 0; c < spec.n_classes + n_ood; ++c) {
      const bool is_ood = c >= spec.n_classes;
      Rng rng = derived_rng(spec.seed, 100 + static_cast<std::uint64_t>(c));
      for (int i = 0; i < spec.samples_per_class; ++i) {
        for (int j = 0; j < spec.vector_dim; ++j) {
          const double v = means[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] +
                           spec.noise * rng.normal();
          scratch[static_cast<std::size_t>(j)] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
        if (is_ood) {
          append_sample(ood, scratch.data(), sample_numel, -1);
        } else {
          append_sample(i < train_per_class ? train : test, scratch.data(), sample_numel, c);
        }
      }
    }
  }

  std::vector<std::string> class_names;
  if (static_cast<int>(spec.in_kinds.size()) >= spec.n_classes) {
    class_names.assign(spec.in_kinds.begin(), spec.in_kinds.begin() + spec.n_classes);
  } else {
    for (int c = 0; c < spec.n_classes; ++c) class_names.push_back("blob" + std::to_string(c));
  }

  GeneratedDataset out;
  out.train = write_split(out_dir, base_name, "train", spec, sample_shape, class_names, train);
  out.test = write_split(out_dir, base_name, "test", spec, sample_shape, class_names, test);
  out.ood = write_split(out_dir, base_name, "ood", spec, sample_shape, class_names, ood);
  save_manifest(out.train, join_path(out_dir, "din_train.json"));
  save_manifest(out.test, join_path(out_dir, "din_test.json"));
  save_manifest(out.ood, join_path(out_dir, "dout.json"));
  return out;
}

}  // namespace oodkit
