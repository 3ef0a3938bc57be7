// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sst/errors.hpp"
#include "sst/rng.hpp"

namespace sst {
namespace fs = std::filesystem;

void FrameSet::append(const Image& image, int label) {
  if (image.width != width || image.height != height || image.channels != 1) {
    throw DimensionMismatch("frame is " + std::to_string(image.width) + "x" + std::to_string(image.height) + "x" +
                            std::to_string(image.channels) + ", expected " + std::to_string(width) + "x" +
                            std::to_string(height) + " gray");
  }
  for (auto px : image.pixels) pixels.push_back(px / 255.0);
  labels.push_back(label);
}

ToySource::ToySource(ToyDatasetSpec spec) : spec_(spec) { spec_.validate(); }

Image ToySource::frame(int object_id, const VariationPoint& p) const { return render_toy(spec_, object_id, p); }

NorbSource::NorbSource(std::vector<NorbRecord> records)
    : records_(std::move(records)), index_(static_cast<std::size_t>(kObjects * kGridSize), -1) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    index_[static_cast<std::size_t>(r.object_id() * kGridSize + r.point().index())] = static_cast<int>(i);
  }
}

NorbSource NorbSource::from_directory(const std::string& dir) {
  auto records = load_norb(dir + "/smallnorb-5x46789x9x18x6x2x96x96-training-dat.mat",
                           dir + "/smallnorb-5x46789x9x18x6x2x96x96-training-cat.mat",
                           dir + "/smallnorb-5x46789x9x18x6x2x96x96-training-info.mat", 3);
  auto test = load_norb(dir + "/smallnorb-5x01235x9x18x6x2x96x96-testing-dat.mat",
                        dir + "/smallnorb-5x01235x9x18x6x2x96x96-testing-cat.mat",
                        dir + "/smallnorb-5x01235x9x18x6x2x96x96-testing-info.mat", 3);
  records.insert(records.end(), std::make_move_iterator(test.begin()), std::make_move_iterator(test.end()));
  return NorbSource(std::move(records));
}

Image NorbSource::frame(int object_id, const VariationPoint& p) const {
  if (object_id < 0 || object_id >= kObjects || !p.valid()) {
    throw IndexOutOfRange("norb frame request outside the dataset");
  }
  const int i = index_[static_cast<std::size_t>(object_id * kGridSize + p.index())];
  if (i < 0) throw IndexOutOfRange("no norb image for " + format_frame_id(object_id, p));
  return records_[static_cast<std::size_t>(i)].image;
}

std::string_view to_string(Recipe r) noexcept {
  switch (r) {
    case Recipe::walk: return "walk";
    case Recipe::native: return "native";
    case Recipe::coil: return "coil";
  }
  return "unknown";
}

Recipe parse_recipe(std::string_view name) {
  for (Recipe r : {Recipe::walk, Recipe::native, Recipe::coil}) {
    if (to_string(r) == name) return r;
  }
  throw UsageError("unknown recipe '" + std::string(name) + "' (expected walk, native, coil)");
}

void BenchmarkConfig::validate() const {
  if (n_batches < 2) throw UsageError("n_batches must be >= 2");
  if (mindist < 0) throw UsageError("mindist must be >= 0");
  if (recipe == Recipe::native && class_mode == ClassMode::fifty) {
    throw UsageError("the native recipe tests on unseen objects; 50-class mode is meaningless there");
  }
  walk.validate();
}

BenchmarkLayout make_layout(const BenchmarkConfig& cfg) {
  cfg.validate();
  BenchmarkLayout out;
  switch (cfg.recipe) {
    case Recipe::walk:
      out.train = generate_train_batches(cfg.n_batches, cfg.walk, derive_seed(cfg.seed, {tag("train")}));
      out.test = generate_test_batches(out.train, cfg.mindist, cfg.walk,
                                       derive_seed(cfg.seed, {tag("test")}), cfg.n_batches);
      break;
    case Recipe::native: {
      std::vector<int> train_objs, test_objs;
      for (int obj = 0; obj < kObjects; ++obj) {
        (obj % kObjectsPerClass < kObjectsPerClass / 2 ? train_objs : test_objs).push_back(obj);
      }
      out.train = generate_walk_batches(cfg.n_batches, train_objs, 2, cfg.walk,
                                        derive_seed(cfg.seed, {tag("train")}), BatchKind::train);
      out.test = generate_walk_batches(cfg.n_batches, test_objs, 2, cfg.walk,
                                       derive_seed(cfg.seed, {tag("test")}), BatchKind::test);
      break;
    }
    case Recipe::coil:
      throw UsageError("the coil recipe has its own layout (make_coil_layout)");
  }
  // Interleave objects inside each batch so a flow does not sweep the classes in order.
  for (auto* batches : {&out.train, &out.test}) {
    for (auto& b : *batches) {
      Rng(derive_seed(cfg.seed, {tag("sequence-order"), static_cast<std::uint64_t>(b.kind),
                                 static_cast<std::uint64_t>(b.index)}))
          .shuffle(b.sequences);
    }
  }
  return out;
}

namespace {

std::string batch_file(const std::string& dir, const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%02d.txt", prefix, index);
  return (fs::path(dir) / buf).string();
}

std::vector<Batch> load_batches(const std::string& dir, const char* prefix, BatchKind kind) {
  std::vector<Batch> out;
  for (int i = 1;; ++i) {
    const std::string path = batch_file(dir, prefix, i);
    if (!fs::exists(path)) break;
    out.push_back({load_manifest(path), kind, i});
  }
  return out;
}

}  // namespace

void save_layout(const std::string& dir, const BenchmarkLayout& layout) {
  fs::create_directories(dir);
  for (const auto& b : layout.train) save_manifest(batch_file(dir, "train", b.index), b.sequences);
  for (const auto& b : layout.test) save_manifest(batch_file(dir, "test", b.index), b.sequences);
}

BenchmarkLayout load_layout(const std::string& dir) {
  BenchmarkLayout layout{load_batches(dir, "train", BatchKind::train), load_batches(dir, "test", BatchKind::test)};
  if (layout.train.empty()) throw Error("no train_01.txt manifest in '" + dir + "'");
  if (layout.test.empty()) throw Error("no test_01.txt manifest in '" + dir + "'");
  return layout;
}

FrameSet materialize(const std::vector<Batch>& batches, const FrameSource& source, ClassMode mode) {
  FrameSet set;
  std::size_t n = 0;
  for (const auto& b : batches) n += b.frame_count();
  set.pixels.reserve(n * set.frame_size());
  set.labels.reserve(n);
  for (const auto& b : batches) {
    for (const auto& seq : b.sequences) {
      for (const auto& p : seq.points) set.append(source.frame(seq.object_id, p), class_of(seq.object_id, mode));
    }
  }
  return set;
}

BenchmarkData build_benchmark(const BenchmarkLayout& layout, const FrameSource& source, ClassMode mode) {
  BenchmarkData data;
  data.n_classes = mode == ClassMode::five ? kObjects / kObjectsPerClass : kObjects;
  for (const auto& b : layout.train) data.train.push_back(materialize({b}, source, mode));
  data.test = materialize(layout.test, source, mode);
  return data;
}

std::vector<int> coil_test_poses() {
  std::vector<int> p;
  for (int i = 0; i < kCoilTestPoses; ++i) p.push_back(i * (kCoilPoses / kCoilTestPoses));
  return p;
}

std::vector<int> coil_train_poses() {
  std::vector<bool> blocked(kCoilPoses, false);
  for (int t : coil_test_poses()) {
    for (int d = -1; d <= 1; ++d) blocked[static_cast<std::size_t>((t + d + kCoilPoses) % kCoilPoses)] = true;
  }
  std::vector<int> out;
  for (int p = 0; p < kCoilPoses; ++p) {
    if (!blocked[static_cast<std::size_t>(p)]) out.push_back(p);
  }
  return out;
}

CoilLayout make_coil_layout(int n_batches, const WalkConfig& walk, std::uint64_t seed) {
  if (n_batches < 2) throw UsageError("n_batches must be >= 2");
  walk.validate();
  const auto track = coil_train_poses();
  const int n = static_cast<int>(track.size());
  CoilLayout layout;
  for (int b = 1; b <= n_batches; ++b) {
    std::vector<CoilSequence> batch;
    for (int obj = 0; obj < kCoilObjects; ++obj) {
      Rng rng(derive_seed(seed, {tag("coil"), static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(obj)}));
      int pos = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int dir = rng.bernoulli(0.5) ? 1 : -1;
      CoilSequence seq{obj, {}};
      for (int k = 0; k < kCoilSequenceLength; ++k) {
        if (k > 0) {
          if (rng.bernoulli(walk.flip_prob)) dir = -dir;
          pos = (pos + dir + n) % n;
        }
        seq.poses.push_back(track[static_cast<std::size_t>(pos)]);
      }
      batch.push_back(std::move(seq));
    }
    layout.train.push_back(std::move(batch));
  }
  for (int obj = 0; obj < kCoilObjects; ++obj) layout.test.push_back({obj, coil_test_poses()});
  return layout;
}

void save_coil_layout(const std::string& dir, const CoilLayout& layout) {
  fs::create_directories(dir);
  const auto save = [](const std::string& path, const std::vector<CoilSequence>& seqs) {
    std::ofstream out(path, std::ios::binary);
    out << write_coil_manifest(seqs);
    if (!out) throw Error("cannot write '" + path + "'");
  };
  for (std::size_t b = 0; b < layout.train.size(); ++b) {
    save(batch_file(dir, "train", static_cast<int>(b) + 1), layout.train[b]);
  }
  save(batch_file(dir, "test", 1), layout.test);
}

CoilLayout load_coil_layout(const std::string& dir) {
  const auto load = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_coil_manifest(ss.str());
  };
  CoilLayout layout;
  for (int i = 1; fs::exists(batch_file(dir, "train", i)); ++i) layout.train.push_back(load(batch_file(dir, "train", i)));
  if (layout.train.empty()) throw Error("no train_01.txt manifest in '" + dir + "'");
  layout.test = load(batch_file(dir, "test", 1));
  return layout;
}

CoilSource::CoilSource(std::map<std::pair<int, int>, Image> images) : images_(std::move(images)) {}

CoilSource CoilSource::from_directory(const std::string& dir) {
  std::map<std::pair<int, int>, Image> images;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    int k = 0, angle = 0;
    char ext[8] = {};
    if (std::sscanf(name.c_str(), "obj%d__%d.%3s", &k, &angle, ext) != 3) continue;
    if (std::string(ext) != "ppm" && std::string(ext) != "pgm") continue;
    if (k < 1 || k > kCoilObjects || angle < 0 || angle >= 360 || angle % 5 != 0) continue;
    Image img = read_pnm(entry.path().string());
    if (img.channels == 3) img = rgb_to_gray(img);
    if (img.width != img.height || img.width % 32 != 0) {
      throw DimensionMismatch(name + ": expected a square image with side a multiple of 32");
    }
    if (img.width != 32) img = downsample_box(img, img.width / 32);
    images.emplace(std::pair{k - 1, angle / 5}, std::move(img));
  }
  if (images.empty()) throw Error("no obj<k>__<angle>.ppm/.pgm images in '" + dir + "'");
  return CoilSource(std::move(images));
}

Image CoilSource::frame(int object_id, int pose) const {
  auto it = images_.find({object_id, pose});
  if (it == images_.end()) {
    throw IndexOutOfRange("no COIL image for object " + std::to_string(object_id) + " pose " + std::to_string(pose));
  }
  return it->second;
}

BenchmarkData build_coil_benchmark(const CoilLayout& layout, const CoilSource& source) {
  BenchmarkData data;
  data.n_classes = kCoilObjects;
  for (const auto& batch : layout.train) {
    FrameSet set;
    for (const auto& seq : batch) {
      for (int pose : seq.poses) set.append(source.frame(seq.object_id, pose), seq.object_id);
    }
    data.train.push_back(std::move(set));
  }
  for (const auto& seq : layout.test) {
    for (int pose : seq.poses) data.test.append(source.frame(seq.object_id, pose), seq.object_id);
  }
  return data;
}

}  // namespace sst
