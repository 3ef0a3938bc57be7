// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Benchmark recipes: which frames form TrainB1..B10 and the test set, and
// how those frames are turned into network inputs.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sst/image.hpp"
#include "sst/manifest.hpp"
#include "sst/norb.hpp"
#include "sst/toy.hpp"
#include "sst/varspace.hpp"

namespace sst {

/// Frames in processing order, as [0,1] pixels, plus class labels.
struct FrameSet {
  int width = 32;
  int height = 32;
  std::vector<double> pixels;  // size() * width * height
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t frame_size() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::span<const double> frame(std::size_t i) const {
    return std::span<const double>(pixels).subspan(i * frame_size(), frame_size());
  }
  void append(const Image& image, int label);
};

struct BenchmarkData {
  int n_classes = 5;
  std::vector<FrameSet> train;  // train[0] is TrainB1
  FrameSet test;
};

/// Image lookup by (object, pose).
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual Image frame(int object_id, const VariationPoint& p) const = 0;
};

class ToySource final : public FrameSource {
 public:
  explicit ToySource(ToyDatasetSpec spec = {});
  Image frame(int object_id, const VariationPoint& p) const override;
  const ToyDatasetSpec& spec() const noexcept { return spec_; }

 private:
  ToyDatasetSpec spec_;
};

/// small-NORB records (training and test splits may be merged) downsampled
/// to 32x32. frame() throws IndexOutOfRange for poses that are not present.
class NorbSource final : public FrameSource {
 public:
  explicit NorbSource(std::vector<NorbRecord> records);
  /// Loads the six official files from `dir`, downsampling by 3.
  static NorbSource from_directory(const std::string& dir);
  Image frame(int object_id, const VariationPoint& p) const override;
  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<NorbRecord>& records() const noexcept { return records_; }

 private:
  std::vector<NorbRecord> records_;
  std::vector<int> index_;  // object * 972 + pose -> record, -1 when absent
};

enum class Recipe { walk, native, coil };

std::string_view to_string(Recipe r) noexcept;
Recipe parse_recipe(std::string_view name);

struct BenchmarkConfig {
  Recipe recipe = Recipe::walk;
  int n_batches = 10;
  int mindist = 1;
  WalkConfig walk{};
  std::uint64_t seed = 1;
  ClassMode class_mode = ClassMode::five;

  void validate() const;
};

/// Sequence layout of a walk or native benchmark.
struct BenchmarkLayout {
  std::vector<Batch> train;
  std::vector<Batch> test;

  friend bool operator==(const BenchmarkLayout&, const BenchmarkLayout&) = default;
};

/// walk: one walk per object per batch, test batches at `mindist`.
/// native: instances 0-4 of each class train, 5-9 test, two walks per object
/// per batch (keeps 1,000 frames), no mindist constraint.
BenchmarkLayout make_layout(const BenchmarkConfig& cfg);

/// Manifests named train_01.txt .. and test_01.txt .. inside `dir`.
void save_layout(const std::string& dir, const BenchmarkLayout& layout);
BenchmarkLayout load_layout(const std::string& dir);

FrameSet materialize(const std::vector<Batch>& batches, const FrameSource& source, ClassMode mode);
BenchmarkData build_benchmark(const BenchmarkLayout& layout, const FrameSource& source, ClassMode mode);

// COIL-100: 100 objects x 72 poses at 5 degree steps.

inline constexpr int kCoilObjects = 100;
inline constexpr int kCoilTestPoses = 6;
inline constexpr int kCoilSequenceLength = 10;

struct CoilLayout {
  std::vector<std::vector<CoilSequence>> train;  // per batch
  std::vector<CoilSequence> test;
};

/// Test poses 0, 12, .., 60 (0, 60, .., 300 degrees); the pose on either
/// side of each is excluded. The remaining 54 poses form a circular track
/// walked in 10-frame sequences that step over the gaps.
std::vector<int> coil_test_poses();
std::vector<int> coil_train_poses();
CoilLayout make_coil_layout(int n_batches, const WalkConfig& walk, std::uint64_t seed);

/// Same file names as save_layout, COIL manifest lines.
void save_coil_layout(const std::string& dir, const CoilLayout& layout);
CoilLayout load_coil_layout(const std::string& dir);

class CoilSource {
 public:
  /// Expects obj<k>__<angle>.ppm or .pgm with k = 1..100 and angle = 0..355.
  /// RGB images are converted to gray; sizes that are a multiple of 32 are
  /// box-downsampled to 32x32.
  static CoilSource from_directory(const std::string& dir);
  explicit CoilSource(std::map<std::pair<int, int>, Image> images);
  Image frame(int object_id, int pose) const;

 private:
  std::map<std::pair<int, int>, Image> images_;
};

BenchmarkData build_coil_benchmark(const CoilLayout& layout, const CoilSource& source);

}  // namespace sst
