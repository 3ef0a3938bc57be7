// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Discrete (elevation, azimuth, lighting) pose grid, temporally coherent random
// walks over it, and train/test batch construction with the mindist
// separation constraint.

#include <array>
#include <cstdint>
#include <vector>

namespace sst {

inline constexpr int kElevations = 9;
inline constexpr int kAzimuths = 18;
inline constexpr int kLightings = 6;
inline constexpr int kGridSize = kElevations * kAzimuths * kLightings;  // 972
inline constexpr int kObjects = 50;
inline constexpr int kObjectsPerClass = 10;

struct VariationPoint {
  int elevation = 0;  // [0, 8], reflecting
  int azimuth = 0;    // [0, 17], circular (18 x 20 degrees)
  int lighting = 0;   // [0, 5], reflecting

  friend bool operator==(const VariationPoint&, const VariationPoint&) = default;

  bool valid() const noexcept {
    return elevation >= 0 && elevation < kElevations && azimuth >= 0 && azimuth < kAzimuths &&
           lighting >= 0 && lighting < kLightings;
  }
  /// Dense index in [0, 972): (elevation * 18 + azimuth) * 6 + lighting.
  int index() const noexcept { return (elevation * kAzimuths + azimuth) * kLightings + lighting; }
  static VariationPoint from_index(int i) noexcept {
    return {i / (kAzimuths * kLightings), (i / kLightings) % kAzimuths, i % kLightings};
  }
};

/// |de| + min(|da|, 18 - |da|) + |dl|
int cityblock_distance(const VariationPoint& a, const VariationPoint& b) noexcept;

struct WalkConfig {
  int length = 20;
  /// Probability of stepping along elevation, azimuth, lighting. Exactly one
  /// dimension moves per transition, so these must sum to 1.
  std::array<double, 3> dim_step_prob{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  /// Probability of reversing the running direction of the chosen dimension.
  double flip_prob = 0.2;
  std::uint64_t seed = 0;

  /// Throws UsageError on invalid values.
  void validate() const;
};

enum class ClassMode { five, fifty };

int class_of(int object_id, ClassMode mode) noexcept;

struct FrameSequence {
  int object_id = 0;
  std::vector<VariationPoint> points;

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;
};

enum class BatchKind { train, test };

struct Batch {
  std::vector<FrameSequence> sequences;
  BatchKind kind = BatchKind::train;
  int index = 1;  // 1-based

  std::size_t frame_count() const noexcept;
  friend bool operator==(const Batch&, const Batch&) = default;
};

/// Walk of cfg.length points starting at `start`. Each transition moves one
/// dimension by one step; azimuth wraps, elevation and lighting reflect.
std::vector<VariationPoint> random_walk(const WalkConfig& cfg, const VariationPoint& start);

/// One walk per object per batch; seeds derived from (master_seed, batch, object).
/// The start pose of each walk is uniform over the grid.
std::vector<Batch> generate_train_batches(int n_batches, const WalkConfig& per_object_walk,
                                          std::uint64_t master_seed, int n_objects = kObjects);

/// Generalization used by the native-segregation recipe: `walks_per_object`
/// independent walks for every listed object in each batch.
std::vector<Batch> generate_walk_batches(int n_batches, const std::vector<int>& objects,
                                         int walks_per_object, const WalkConfig& per_object_walk,
                                         std::uint64_t master_seed, BatchKind kind);

/// Per-object mask of grid points at distance >= mindist from every training
/// point of that object, indexed by VariationPoint::index().
std::vector<std::vector<bool>> allowed_points(const std::vector<Batch>& train, int mindist,
                                              int n_objects = kObjects);

inline constexpr int kMaxWalkRestarts = 1000;

/// Test batches whose every point keeps at least `mindist` from the training
/// points of the same object. Walks are confined to the allowed sub-grid; a
/// walk that dead-ends restarts from a fresh allowed start (at most
/// kMaxWalkRestarts times per sequence). Throws InfeasibleRegion.
std::vector<Batch> generate_test_batches(const std::vector<Batch>& train, int mindist,
                                         const WalkConfig& cfg, std::uint64_t seed,
                                         int n_batches = 10, int n_objects = kObjects);

struct MindistViolation {
  int object_id;
  int test_batch;
  VariationPoint test_point;
  VariationPoint train_point;
  int distance;
};

struct MindistReport {
  bool ok = true;
  std::size_t comparisons = 0;
  std::vector<MindistViolation> violations;
};

/// Exhaustive pairwise check restricted to equal object ids.
MindistReport verify_mindist(const std::vector<Batch>& train, const std::vector<Batch>& test,
                             int mindist);

/// Number of distinct (object, point) frames across the batches.
std::size_t unique_frame_count(const std::vector<Batch>& batches);

}  // namespace sst
