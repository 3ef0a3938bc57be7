// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Desired-output rules for incremental tuning. Each rule turns the network
// output history of a frame flow (and, for the supervised rules, the label)
// into the target of the squared-error step, or decides to skip the frame.

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace sst {

enum class StrategyKind {
  SupT,             // target = one-hot label
  SupTR,            // target = lambda * one-hot + (1 - lambda) * previous output
  SST_B,            // target = previous output
  SST_A,            // target = fused history f, if max f > sc
  SST_A_Delta,      // target = one-hot at argmax f, if max f > sc
  SST_A_Delta_noTC  // target = one-hot at argmax current output, if its max > sc
};

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::SupT,  StrategyKind::SupTR,       StrategyKind::SST_B,
    StrategyKind::SST_A, StrategyKind::SST_A_Delta, StrategyKind::SST_A_Delta_noTC};

/// CLI spelling: supt, suptr, sst-b, sst-a, sst-a-delta, sst-a-delta-notc.
std::string_view to_string(StrategyKind kind) noexcept;
/// Throws UsageError.
StrategyKind parse_strategy(std::string_view name);

bool is_supervised(StrategyKind kind) noexcept;
bool uses_temporal_state(StrategyKind kind) noexcept;

struct StrategyConfig {
  double lambda = 2.0 / 3.0;
  double sc = 0.65;
  int n_w = 5;

  /// Throws UsageError.
  void validate() const;
};

/// Output history of one frame flow.
///
/// t counts frames from 1. prev_output is N(v^(t-1)) as computed when frame
/// t-1 was processed. f follows
///   f(2) = N(v^1),   f(t) = (f(t-1) + N(v^(t-1))) / 2  for t > 2,
/// and is absent for t < 2.
struct TemporalState {
  int t = 1;
  std::optional<std::vector<double>> prev_output;
  std::optional<std::vector<double>> f;
};

/// Moves to the next frame, recording the output computed for the current one.
TemporalState advance_temporal(const TemporalState& state, std::span<const double> new_prev_output);
/// In-place variant used on the hot path.
void advance_temporal_inplace(TemporalState& state, std::span<const double> new_prev_output);

struct Target {
  std::vector<double> values;
  friend bool operator==(const Target&, const Target&) = default;
};
struct Skip {
  friend bool operator==(const Skip&, const Skip&) = default;
};
using DesiredDecision = std::variant<Target, Skip>;

/// One-hot of length n_w. Throws IndexOutOfRange.
std::vector<double> delta_vector(int w, int n_w);

/// Target for the current frame. `state` may be null only for SupT. Throws
/// MissingLabel (supervised kinds without a label) and MissingState.
DesiredDecision desired_output(StrategyKind kind, const StrategyConfig& cfg,
                               const TemporalState* state, std::span<const double> current_output,
                               std::optional<int> label);

}  // namespace sst
