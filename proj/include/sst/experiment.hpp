// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Incremental protocol: supervised pre-training on TrainB1, then tuning on
// the remaining batches in a shuffled order, evaluating the whole test set
// after pre-training and after every tuned batch.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sst/benchmark.hpp"
#include "sst/network.hpp"
#include "sst/strategies.hpp"

namespace sst {

/// "default" or "compact". Throws UsageError.
std::vector<LayerSpec> architecture_by_name(const std::string& name, int n_outputs);

/// Exactly round(fraction * n) labels, at distinct random positions, are
/// replaced by a uniformly drawn different class. Throws UsageError.
std::vector<int> inject_label_noise(std::span<const int> labels, double fraction, int n_w,
                                    std::uint64_t seed);

struct PretrainConfig {
  int epochs = 30;
  double lr = 0.02;
  int minibatch = 10;
  std::uint64_t seed = 0;  // shuffling
};

/// Mini-batch SGD towards one-hot targets. `labels` overrides the frame
/// labels when non-empty (label noise). Returns the mean loss of every epoch.
/// Throws DivergenceDetected.
std::vector<double> supervised_pretrain(Network& net, const FrameSet& frames, std::span<const int> labels,
                                        const PretrainConfig& cfg);

struct TuneConfig {
  StrategyKind strategy = StrategyKind::SST_A;
  StrategyConfig strategy_cfg{};
  int epochs = 100;
  double lr = 0.005;
};

struct TuneStats {
  std::vector<double> epoch_loss;  // mean loss over the frames that were updated
  std::size_t updates = 0;
  std::size_t skips = 0;
};

/// Each epoch is one pass over the batch as a single frame flow: the
/// temporal state is reset, then every frame is forwarded, its desired output
/// requested, and a single online step taken on Target. Throws
/// DivergenceDetected.
TuneStats tune_on_batch(Network& net, const FrameSet& batch, const TuneConfig& cfg);

/// Fraction of frames whose argmax output equals the label.
double evaluate_frame_accuracy(const Network& net, const FrameSet& test);

/// Mean output entropy in bits over the first `max_frames` frames.
double entropy_report(const Network& net, const FrameSet& frames, std::size_t max_frames = 1000);

struct ExperimentConfig {
  StrategyKind strategy = StrategyKind::SST_A;
  StrategyConfig strategy_cfg{};
  int runs = 10;
  int epochs_per_batch = 100;
  int pretrain_epochs = 30;
  double pretrain_lr = 0.02;
  int pretrain_minibatch = 10;
  double tune_lr = 0.005;
  double label_noise = 0.0;
  bool share_pretrain = true;
  std::string arch = "default";
  std::uint64_t seed = 1;
  int jobs = 1;

  void validate() const;
};

struct RunResult {
  std::vector<double> accuracy_at;  // checkpoint 1 = after pre-training
  std::vector<double> entropy_at;
  std::vector<int> batch_order;     // 1-based batch indices tuned, in order
};

struct CheckpointStats {
  double mean = 0.0;
  double std = 0.0;
  std::optional<double> ci95;  // 1.96 * std / sqrt(runs); absent for one run
};

struct AggregateResult {
  std::vector<CheckpointStats> checkpoints;
  int runs = 0;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  AggregateResult aggregate;
};

/// Sample standard deviation (n - 1), 0 for a single run.
AggregateResult aggregate(const std::vector<RunResult>& runs);

/// Runs are independent and spread over cfg.jobs threads; results are in
/// run order regardless. Throws UsageError, DivergenceDetected.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const BenchmarkData& data);

/// The network every run starts tuning from when pre-training is shared.
Network pretrained_network(const ExperimentConfig& cfg, const BenchmarkData& data, int run = 0);

}  // namespace sst
