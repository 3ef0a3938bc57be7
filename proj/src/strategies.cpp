// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/strategies.hpp"

#include <algorithm>
#include <string>

#include "sst/errors.hpp"
#include "sst/network.hpp"

namespace sst {

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::SupT: return "supt";
    case StrategyKind::SupTR: return "suptr";
    case StrategyKind::SST_B: return "sst-b";
    case StrategyKind::SST_A: return "sst-a";
    case StrategyKind::SST_A_Delta: return "sst-a-delta";
    case StrategyKind::SST_A_Delta_noTC: return "sst-a-delta-notc";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  for (StrategyKind k : kAllStrategies) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown strategy '" + std::string(name) +
                   "' (expected supt, suptr, sst-b, sst-a, sst-a-delta, sst-a-delta-notc)");
}

bool is_supervised(StrategyKind kind) noexcept {
  return kind == StrategyKind::SupT || kind == StrategyKind::SupTR;
}

bool uses_temporal_state(StrategyKind kind) noexcept {
  return kind != StrategyKind::SupT && kind != StrategyKind::SST_A_Delta_noTC;
}

void StrategyConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must be in [0,1]");
  if (!(sc >= 0.0)) throw UsageError("sc must be >= 0");
  if (n_w < 1) throw UsageError("n_w must be >= 1");
}

void advance_temporal_inplace(TemporalState& state, std::span<const double> new_prev_output) {
  ++state.t;
  if (state.t == 2 || !state.f) {
    state.f.emplace(new_prev_output.begin(), new_prev_output.end());
  } else {
    auto& f = *state.f;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = (f[i] + new_prev_output[i]) / 2.0;
  }
  if (state.prev_output) {
    state.prev_output->assign(new_prev_output.begin(), new_prev_output.end());
  } else {
    state.prev_output.emplace(new_prev_output.begin(), new_prev_output.end());
  }
}

TemporalState advance_temporal(const TemporalState& state, std::span<const double> new_prev_output) {
  TemporalState next = state;
  advance_temporal_inplace(next, new_prev_output);
  return next;
}

std::vector<double> delta_vector(int w, int n_w) {
  if (n_w < 1 || w < 0 || w >= n_w) {
    throw IndexOutOfRange("class index " + std::to_string(w) + " outside [0, " +
                          std::to_string(n_w) + ")");
  }
  std::vector<double> d(static_cast<std::size_t>(n_w), 0.0);
  d[static_cast<std::size_t>(w)] = 1.0;
  return d;
}

DesiredDecision desired_output(StrategyKind kind, const StrategyConfig& cfg,
                               const TemporalState* state, std::span<const double> current_output,
                               std::optional<int> label) {
  if (is_supervised(kind) && !label) {
    throw MissingLabel(std::string(to_string(kind)) + " needs the frame label");
  }
  if (uses_temporal_state(kind) && state == nullptr) {
    throw MissingState(std::string(to_string(kind)) + " needs a frame-flow state");
  }
  const auto max_of = [](std::span<const double> v) { return *std::max_element(v.begin(), v.end()); };

  switch (kind) {
    case StrategyKind::SupT: return Target{delta_vector(*label, cfg.n_w)};

    case StrategyKind::SupTR: {
      auto d = delta_vector(*label, cfg.n_w);
      if (!state->prev_output) return Target{std::move(d)};
      const auto& prev = *state->prev_output;
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = cfg.lambda * d[i] + (1.0 - cfg.lambda) * prev[i];
      return Target{std::move(d)};
    }

    case StrategyKind::SST_B:
      if (!state->prev_output) return Skip{};
      return Target{*state->prev_output};

    case StrategyKind::SST_A:
      if (!state->f || !(max_of(*state->f) > cfg.sc)) return Skip{};
      return Target{*state->f};

    case StrategyKind::SST_A_Delta:
      if (!state->f || !(max_of(*state->f) > cfg.sc)) return Skip{};
      return Target{delta_vector(argmax(*state->f), cfg.n_w)};

    case StrategyKind::SST_A_Delta_noTC:
      if (current_output.empty() || !(max_of(current_output) > cfg.sc)) return Skip{};
      return Target{delta_vector(argmax(current_output), cfg.n_w)};
  }
  return Skip{};
}

}  // namespace sst
