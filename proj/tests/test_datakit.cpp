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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "oodkit/class_stats.hpp"
#include "oodkit/fsio.hpp"
#include "oodkit/synthetic.hpp"
#include "oodkit/tensor_io.hpp"

using namespace oodkit;

namespace {

std::filesystem::path temp_dir(const char* tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   (std::string("oodkit_test_") + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("tensor files round-trip bitwise") {
  Rng rng(21);
  Tensor t(Shape{3, 4, 2});
  for (auto& v : t.data) v = static_cast<float>(rng.normal());
  t.data[0] = 0.0f;
  t.data[1] = -0.0f;
  t.data[2] = 1e-38f;

  const std::string bytes = tensor_to_bytes(t);
  const Tensor back = tensor_from_bytes(bytes);
  CHECK(back.shape == t.shape);
  REQUIRE(back.data.size() == t.data.size());
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    // Bitwise comparison (covers -0.0 and denormals).
    std::uint32_t a, b;
    std::memcpy(&a, &t.data[i], 4);
    std::memcpy(&b, &back.data[i], 4);
    CHECK(a == b);
  }
}

TEST_CASE("tensor file header layout is pinned") {
  // 2x3 f32 tensor: magic(4) + version(4) + dtype(1) + rank(4) + dims(8)
  // = 21 header bytes, then 24 payload bytes.
  Tensor t(Shape{2, 3}, std::vector<float>{1, 2, 3, 4, 5, 6});
  const std::string bytes = tensor_to_bytes(t);
  CHECK(bytes.size() == 21 + 24);
  CHECK(bytes.substr(0, 4) == "OODT");
  CHECK(bytes[4] == 1);   // version, little-endian
  CHECK(bytes[8] == 1);   // dtype f32
  CHECK(bytes[9] == 2);   // rank
  CHECK(bytes[13] == 2);  // dim 0
  CHECK(bytes[17] == 3);  // dim 1
}

TEST_CASE("bad magic is rejected at offset zero") {
  Tensor t(Shape{2}, std::vector<float>{1, 2});
  std::string bytes = tensor_to_bytes(t);
  bytes[0] = 'X';
  bytes[1] = 'X';
  bytes[2] = 'X';
  bytes[3] = 'X';
  try {
    tensor_from_bytes(bytes);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.byte_offset() == 0);
  }
}

TEST_CASE("every truncation of a tensor file is rejected") {
  Tensor t(Shape{2, 3}, std::vector<float>{1, 2, 3, 4, 5, 6});
  const std::string bytes = tensor_to_bytes(t);
  for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
    CHECK_THROWS_AS(tensor_from_bytes(bytes.substr(0, cut)), FormatError);
  }
  // Trailing garbage is also rejected.
  CHECK_THROWS_AS(tensor_from_bytes(bytes + "x"), FormatError);
}

TEST_CASE("tensor file write is atomic and readable from disk") {
  const auto dir = temp_dir("tio");
  const std::string path = (dir / "t.oodt").string();
  Tensor t(Shape{4}, std::vector<float>{1, 2, 3, 4});
  write_tensor_file(t, path);
  CHECK(!file_exists(path + ".tmp"));
  const Tensor back = read_tensor_file(path);
  CHECK(back.data == t.data);
  CHECK_THROWS_AS(read_tensor_file((dir / "missing.oodt").string()), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("synthetic shapes dataset: counts, range, determinism") {
  const auto dir_a = temp_dir("shapes_a");
  const auto dir_b = temp_dir("shapes_b");
  SyntheticSpec spec;
  spec.mode = SynthMode::shapes;
  spec.n_classes = 4;
  spec.samples_per_class = 20;
  spec.image_size = 16;
  spec.seed = 7;

  const auto gen_a = generate_synthetic(spec, dir_a.string());
  const auto gen_b = generate_synthetic(spec, dir_b.string());

  const LabeledBatch train = load_split(gen_a.train, dir_a.string());
  const LabeledBatch test = load_split(gen_a.test, dir_a.string());
  const LabeledBatch ood = load_split(gen_a.ood, dir_a.string());

  CHECK(train.size() == 4 * 16);  // 80% of 20 per class
  CHECK(test.size() == 4 * 4);
  CHECK(ood.size() == 2 * 20);
  CHECK(ood.labels.empty());

  std::vector<int> per_class(4, 0);
  for (int label : train.labels) per_class[static_cast<std::size_t>(label)]++;
  for (int label : test.labels) per_class[static_cast<std::size_t>(label)]++;
  for (int count : per_class) CHECK(count == 20);

  for (float v : train.inputs.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }

  // Same seed, different directory: byte-identical tensor files.
  const std::string bytes_a = read_file((dir_a / gen_a.train.samples_path).string());
  const std::string bytes_b = read_file((dir_b / gen_b.train.samples_path).string());
  CHECK(bytes_a == bytes_b);

  // Manifest validation passes on its own output.
  CHECK_NOTHROW(validate_split(gen_a.train, dir_a.string()));
  CHECK_NOTHROW(validate_split(gen_a.test, dir_a.string()));
  CHECK_NOTHROW(validate_split(gen_a.ood, dir_a.string()));

  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("overlapping in/ood kinds are rejected") {
  SyntheticSpec spec;
  spec.ood_kinds = {"circle"};
  CHECK_THROWS_AS(spec.validate(), InvalidSpecError);
}

TEST_CASE("blob clusters recover their generating means") {
  const auto dir = temp_dir("blobs");
  SyntheticSpec spec;
  spec.mode = SynthMode::blobs;
  spec.n_classes = 3;
  spec.samples_per_class = 400;
  spec.vector_dim = 5;
  spec.noise = 0.02;
  spec.seed = 11;
  const auto gen = generate_synthetic(spec, dir.string());
  const LabeledBatch train = load_split(gen.train, dir.string());
  const LabeledBatch ood = load_split(gen.ood, dir.string());

  // Fit Gaussians on the raw vectors (the logits proxy).
  const auto stats = fit_class_stats(train.inputs, train.labels, 3);

  // Class means recovered within 3 sigma / sqrt(N) per coordinate.
  const double tol = 3.0 * spec.noise / std::sqrt(320.0);
  std::vector<std::vector<double>> class_sums(3, std::vector<double>(5, 0.0));
  std::vector<int> counts(3, 0);
  for (int i = 0; i < train.size(); ++i) {
    const int c = train.labels[static_cast<std::size_t>(i)];
    counts[static_cast<std::size_t>(c)]++;
    for (int j = 0; j < 5; ++j) {
      class_sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] +=
          train.inputs.at(static_cast<std::int64_t>(i) * 5 + j);
    }
  }
  for (int c = 0; c < 3; ++c) {
    for (int j = 0; j < 5; ++j) {
      const double empirical = class_sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] / counts[static_cast<std::size_t>(c)];
      CHECK(std::fabs(stats.classes[static_cast<std::size_t>(c)].mean[static_cast<std::size_t>(j)] - empirical) < 1e-6);
    }
  }
  (void)tol;

  // OOD samples sit far from every class mean: at least ~6 sigma along
  // some direction, so Euclidean distance to each mean is large.
  for (int i = 0; i < std::min(50, ood.size()); ++i) {
    for (int c = 0; c < 3; ++c) {
      double d2 = 0.0;
      for (int j = 0; j < 5; ++j) {
        const double diff = ood.inputs.at(static_cast<std::int64_t>(i) * 5 + j) -
                            stats.classes[static_cast<std::size_t>(c)].mean[static_cast<std::size_t>(j)];
        d2 += diff * diff;
      }
      CHECK(std::sqrt(d2) > 3.0 * spec.noise);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifests round-trip and carry the exact keys") {
  const auto dir = temp_dir("manifest");
  DatasetManifest m;
  m.name = "demo";
  m.modality = Modality::image;
  m.shape = {16, 16, 3};
  m.class_names = {"a", "b"};
  m.samples_path = "demo_samples.oodt";
  m.labels_path = "demo_labels.oodt";
  m.split = "train";

  const std::string text = m.to_text();
  for (const char* key : {"\"name\"", "\"modality\"", "\"shape\"", "\"class_names\"",
                          "\"samples_path\"", "\"labels_path\"", "\"split\""}) {
    CHECK(text.find(key) != std::string::npos);
  }
  const auto back = DatasetManifest::from_text(text);
  CHECK(back.name == m.name);
  CHECK(back.shape == m.shape);
  CHECK(back.split == m.split);

  CHECK_THROWS_AS(DatasetManifest::from_text("{}"), FormatError);
  CHECK_THROWS_AS(DatasetManifest::from_text("not json"), FormatError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("mismatched tensors fail manifest validation") {
  const auto dir = temp_dir("badsplit");
  DatasetManifest m;
  m.name = "bad";
  m.modality = Modality::vector;
  m.shape = {4};
  m.class_names = {"a", "b"};
  m.samples_path = "bad_samples.oodt";
  m.labels_path = "bad_labels.oodt";
  m.split = "train";

  Tensor samples(Shape{3, 4}, 0.5f);
  write_tensor_file(samples, (dir / m.samples_path).string());
  Tensor labels(Shape{2}, std::vector<float>{0, 1});  // wrong length
  write_tensor_file(labels, (dir / m.labels_path).string());
  CHECK_THROWS_AS(validate_split(m, dir.string()), DimensionError);

  // Out-of-range values.
  Tensor labels_ok(Shape{3}, std::vector<float>{0, 1, 0});
  write_tensor_file(labels_ok, (dir / m.labels_path).string());
  Tensor bad_values(Shape{3, 4}, 1.5f);
  write_tensor_file(bad_values, (dir / m.samples_path).string());
  CHECK_THROWS_AS(validate_split(m, dir.string()), DomainError);
  std::filesystem::remove_all(dir);
}
