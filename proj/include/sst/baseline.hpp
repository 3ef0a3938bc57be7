// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Non-incremental reference training: a labelled subset of a training set,
// enlarged with jittered copies, trained with mini-batch SGD. The test set is
// split into k folds; each fold in turn is the validation set that picks the
// stopping epoch, and accuracy is measured on the other folds at that epoch.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sst/benchmark.hpp"
#include "sst/rng.hpp"

namespace sst {

/// Small random similarity transform, bilinear resampling, edges clamped.
struct JitterConfig {
  double max_shift = 2.0;         // pixels, each axis
  double max_rotation_deg = 10.0;
  double max_scale = 0.10;        // scale drawn from [1 - s, 1 + s]
};

std::vector<double> jitter_frame(std::span<const double> frame, int width, int height, const JitterConfig& cfg,
                                 Rng& rng);

struct BaselineConfig {
  int patterns_per_class = 1000;
  int jittered = 4000;  // extra patterns, drawn from the chosen subset
  JitterConfig jitter{};
  std::string arch = "default";
  int epochs = 150;
  int minibatch = 100;
  double lr = 0.05;
  int folds = 5;
  std::uint64_t seed = 1;

  /// Throws UsageError.
  void validate() const;
};

struct BaselineResult {
  std::vector<double> fold_accuracy;
  std::vector<int> fold_epoch;  // 1-based stopping epoch picked by each fold
  double mean_accuracy = 0.0;
};

/// Picks `patterns_per_class` frames per class from `train`, adds jittered
/// copies, trains, and evaluates on `test` after every epoch. Throws
/// UsageError, DivergenceDetected.
BaselineResult run_baseline(const FrameSet& train, const FrameSet& test, int n_classes,
                            const BaselineConfig& cfg);

/// Left-eye small-NORB split as FrameSets (official training/testing files),
/// downsampled 96 -> 32.
struct NorbSplit {
  FrameSet train;
  FrameSet test;
};
NorbSplit load_norb_split(const std::string& dir);

}  // namespace sst
