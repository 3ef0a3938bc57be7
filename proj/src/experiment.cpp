// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <variant>

#include "sst/errors.hpp"
#include "sst/rng.hpp"

namespace sst {

std::vector<LayerSpec> architecture_by_name(const std::string& name, int n_outputs) {
  if (name == "default") return default_architecture(n_outputs);
  if (name == "compact") return compact_architecture(n_outputs);
  throw UsageError("unknown architecture '" + name + "' (expected default, compact)");
}

std::vector<int> inject_label_noise(std::span<const int> labels, double fraction, int n_w,
                                    std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw UsageError("label noise fraction must be in [0,1]");
  std::vector<int> out(labels.begin(), labels.end());
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(labels.size())));
  if (k == 0) return out;
  if (n_w < 2) throw UsageError("label noise needs at least two classes");
  std::vector<std::size_t> idx(labels.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
    const std::size_t pos = idx[i];
    const int shift = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_w - 1)));
    out[pos] = (out[pos] + shift) % n_w;
  }
  return out;
}

std::vector<double> supervised_pretrain(Network& net, const FrameSet& frames, std::span<const int> labels,
                                        const PretrainConfig& cfg) {
  if (cfg.epochs < 0) throw UsageError("pretrain epochs must be >= 0");
  if (cfg.minibatch < 1) throw UsageError("pretrain minibatch must be >= 1");
  if (!labels.empty() && labels.size() != frames.size()) throw UsageError("label count differs from frame count");
  const auto label_of = [&](std::size_t i) { return labels.empty() ? frames.labels[i] : labels[i]; };
  const int n_w = net.output_size();

  Workspace ws(net);
  Gradients grads(net);
  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);
  std::vector<double> epoch_loss;
  for (int e = 0; e < cfg.epochs; ++e) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.minibatch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.minibatch));
      grads.zero();
      for (std::size_t i = start; i < end; ++i) {
        ws.forward(net, frames.frame(order[i]));
        total += ws.backward(net, delta_vector(label_of(order[i]), n_w), grads);
      }
      try {
        apply_gradients(net, grads, cfg.lr / static_cast<double>(end - start));
      } catch (const NonFiniteGradient& e) {
        throw DivergenceDetected(std::string("pre-training diverged: ") + e.what());
      }
    }
    const double mean = frames.size() ? total / static_cast<double>(frames.size()) : 0.0;
    if (!std::isfinite(mean)) throw DivergenceDetected("pre-training loss is not finite at epoch " + std::to_string(e + 1));
    epoch_loss.push_back(mean);
  }
  return epoch_loss;
}

TuneStats tune_on_batch(Network& net, const FrameSet& batch, const TuneConfig& cfg) {
  if (cfg.epochs < 0) throw UsageError("epochs_per_batch must be >= 0");
  cfg.strategy_cfg.validate();
  if (cfg.strategy_cfg.n_w != net.output_size()) {
    throw UsageError("strategy n_w " + std::to_string(cfg.strategy_cfg.n_w) + " differs from network outputs " +
                     std::to_string(net.output_size()));
  }
  const bool supervised = is_supervised(cfg.strategy);
  Workspace ws(net);
  Gradients grads(net);
  std::vector<double> current(static_cast<std::size_t>(net.output_size()));
  TuneStats stats;
  for (int e = 0; e < cfg.epochs; ++e) {
    TemporalState state;
    double total = 0.0;
    std::size_t updated = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto out = ws.forward(net, batch.frame(i));
      std::copy(out.begin(), out.end(), current.begin());
      const auto label = supervised ? std::optional<int>(batch.labels[i]) : std::nullopt;
      const auto decision = desired_output(cfg.strategy, cfg.strategy_cfg, &state, current, label);
      if (const auto* target = std::get_if<Target>(&decision)) {
        grads.zero();
        total += ws.backward(net, target->values, grads);
        try {
          apply_gradients(net, grads, cfg.lr);
        } catch (const NonFiniteGradient& ex) {
          throw DivergenceDetected(std::string("tuning diverged: ") + ex.what());
        }
        ++updated;
      } else {
        ++stats.skips;
      }
      advance_temporal_inplace(state, current);
    }
    const double mean = updated ? total / static_cast<double>(updated) : 0.0;
    if (!std::isfinite(mean)) throw DivergenceDetected("tuning loss is not finite at epoch " + std::to_string(e + 1));
    stats.epoch_loss.push_back(mean);
    stats.updates += updated;
  }
  return stats;
}

double evaluate_frame_accuracy(const Network& net, const FrameSet& test) {
  if (test.size() == 0) throw UsageError("empty test set");
  Workspace ws(net);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (argmax(ws.forward(net, test.frame(i))) == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double entropy_report(const Network& net, const FrameSet& frames, std::size_t max_frames) {
  Workspace ws(net);
  std::vector<std::vector<double>> outs;
  const std::size_t n = std::min(max_frames, frames.size());
  outs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = ws.forward(net, frames.frame(i));
    outs.emplace_back(o.begin(), o.end());
  }
  return output_entropy(outs);
}

void ExperimentConfig::validate() const {
  strategy_cfg.validate();
  if (runs < 1) throw UsageError("runs must be >= 1");
  if (epochs_per_batch < 0) throw UsageError("epochs_per_batch must be >= 0");
  if (pretrain_epochs < 0) throw UsageError("pretrain_epochs must be >= 0");
  if (pretrain_minibatch < 1) throw UsageError("pretrain_minibatch must be >= 1");
  if (!(pretrain_lr >= 0.0) || !(tune_lr >= 0.0)) throw UsageError("learning rates must be >= 0");
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) throw UsageError("label_noise must be in [0,1]");
  if (jobs < 1) throw UsageError("jobs must be >= 1");
  architecture_by_name(arch, 2);
}

AggregateResult aggregate(const std::vector<RunResult>& runs) {
  AggregateResult agg;
  agg.runs = static_cast<int>(runs.size());
  if (runs.empty()) return agg;
  const std::size_t n_ck = runs.front().accuracy_at.size();
  for (std::size_t c = 0; c < n_ck; ++c) {
    CheckpointStats s;
    // Shifted by the first run so identical runs give exactly zero spread.
    const double x0 = runs.front().accuracy_at.at(c);
    double shift = 0.0;
    for (const auto& r : runs) shift += r.accuracy_at.at(c) - x0;
    s.mean = x0 + shift / static_cast<double>(runs.size());
    if (runs.size() > 1) {
      double ss = 0.0;
      for (const auto& r : runs) ss += (r.accuracy_at[c] - s.mean) * (r.accuracy_at[c] - s.mean);
      s.std = std::sqrt(ss / static_cast<double>(runs.size() - 1));
      s.ci95 = 1.96 * s.std / std::sqrt(static_cast<double>(runs.size()));
    }
    agg.checkpoints.push_back(s);
  }
  return agg;
}

Network pretrained_network(const ExperimentConfig& cfg, const BenchmarkData& data, int run) {
  if (data.train.empty()) throw UsageError("benchmark has no training batches");
  const std::uint64_t r = cfg.share_pretrain ? 0 : static_cast<std::uint64_t>(run);
  Network net(architecture_by_name(cfg.arch, data.n_classes), derive_seed(cfg.seed, {tag("init"), r}));
  const auto& b1 = data.train.front();
  const auto labels = inject_label_noise(b1.labels, cfg.label_noise, data.n_classes,
                                         derive_seed(cfg.seed, {tag("noise"), r}));
  supervised_pretrain(net, b1, labels,
                      {cfg.pretrain_epochs, cfg.pretrain_lr, cfg.pretrain_minibatch,
                       derive_seed(cfg.seed, {tag("pretrain"), r})});
  return net;
}

namespace {

RunResult run_one(const ExperimentConfig& cfg, const BenchmarkData& data, const Network& start, int run) {
  Network net = start;
  RunResult res;
  for (int b = 2; b <= static_cast<int>(data.train.size()); ++b) res.batch_order.push_back(b);
  Rng(derive_seed(cfg.seed, {tag("order"), static_cast<std::uint64_t>(run)})).shuffle(res.batch_order);

  StrategyConfig scfg = cfg.strategy_cfg;
  scfg.n_w = data.n_classes;
  const TuneConfig tcfg{cfg.strategy, scfg, cfg.epochs_per_batch, cfg.tune_lr};

  res.accuracy_at.push_back(evaluate_frame_accuracy(net, data.test));
  res.entropy_at.push_back(entropy_report(net, data.test));
  for (int b : res.batch_order) {
    tune_on_batch(net, data.train[static_cast<std::size_t>(b - 1)], tcfg);
    res.accuracy_at.push_back(evaluate_frame_accuracy(net, data.test));
    res.entropy_at.push_back(entropy_report(net, data.test));
  }
  return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const BenchmarkData& data) {
  cfg.validate();
  if (data.train.size() < 2) throw UsageError("benchmark needs at least two training batches");
  if (data.test.size() == 0) throw UsageError("benchmark has an empty test set");

  std::optional<Network> shared;
  if (cfg.share_pretrain) shared = pretrained_network(cfg, data);

  ExperimentResult result;
  result.runs.resize(static_cast<std::size_t>(cfg.runs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto worker = [&] {
    for (int r; (r = next.fetch_add(1)) < cfg.runs;) {
      try {
        const Network start = shared ? *shared : pretrained_network(cfg, data, r);
        result.runs[static_cast<std::size_t>(r)] = run_one(cfg, data, start, r);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(cfg.runs);
      }
    }
  };
  const int threads = std::min(cfg.jobs, cfg.runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  result.aggregate = aggregate(result.runs);
  return result;
}

}  // namespace sst
