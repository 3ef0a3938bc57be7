// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sst/errors.hpp"
#include "sst/experiment.hpp"

namespace sst {

std::vector<double> jitter_frame(std::span<const double> frame, int width, int height, const JitterConfig& cfg,
                                 Rng& rng) {
  if (frame.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionMismatch("jitter: frame size does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
  const double dx = rng.uniform(-cfg.max_shift, cfg.max_shift);
  const double dy = rng.uniform(-cfg.max_shift, cfg.max_shift);
  const double angle = rng.uniform(-cfg.max_rotation_deg, cfg.max_rotation_deg) * std::numbers::pi / 180.0;
  const double s = rng.uniform(1.0 - cfg.max_scale, 1.0 + cfg.max_scale);
  const double c = std::cos(angle) / s, sn = std::sin(angle) / s;
  const double cx = 0.5 * (width - 1), cy = 0.5 * (height - 1);

  const auto px = [&](int x, int y) {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return frame[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  };
  std::vector<double> out(frame.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      // Inverse map: output pixel -> source position.
      const double ux = x - cx - dx, uy = y - cy - dy;
      const double sx = c * ux + sn * uy + cx, sy = -sn * ux + c * uy + cy;
      const double fx = std::floor(sx), fy = std::floor(sy);
      const double ax = sx - fx, ay = sy - fy;
      const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] =
          (1 - ay) * ((1 - ax) * px(x0, y0) + ax * px(x0 + 1, y0)) +
          ay * ((1 - ax) * px(x0, y0 + 1) + ax * px(x0 + 1, y0 + 1));
    }
  }
  return out;
}

void BaselineConfig::validate() const {
  if (patterns_per_class < 1) throw UsageError("patterns_per_class must be >= 1");
  if (jittered < 0) throw UsageError("jittered must be >= 0");
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (minibatch < 1) throw UsageError("minibatch must be >= 1");
  if (!(lr > 0.0)) throw UsageError("lr must be > 0");
  if (folds < 2) throw UsageError("folds must be >= 2");
  architecture_by_name(arch, 2);
}

BaselineResult run_baseline(const FrameSet& train, const FrameSet& test, int n_classes,
                            const BaselineConfig& cfg) {
  cfg.validate();
  if (test.size() < static_cast<std::size_t>(cfg.folds)) throw UsageError("test set smaller than the fold count");

  // Per-class subset.
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng pick(derive_seed(cfg.seed, {tag("baseline-subset")}));
  pick.shuffle(order);
  std::vector<int> taken(static_cast<std::size_t>(n_classes), 0);
  FrameSet set;
  set.width = train.width;
  set.height = train.height;
  for (std::size_t i : order) {
    const int label = train.labels[i];
    if (label < 0 || label >= n_classes) throw UsageError("train label outside [0, n_classes)");
    if (taken[static_cast<std::size_t>(label)] >= cfg.patterns_per_class) continue;
    ++taken[static_cast<std::size_t>(label)];
    const auto f = train.frame(i);
    set.pixels.insert(set.pixels.end(), f.begin(), f.end());
    set.labels.push_back(label);
  }
  const std::size_t base = set.size();
  if (base == 0) throw UsageError("empty training set");
  Rng jit(derive_seed(cfg.seed, {tag("baseline-jitter")}));
  for (int j = 0; j < cfg.jittered; ++j) {
    const std::size_t src = static_cast<std::size_t>(jit.below(base));
    const std::vector<double> copy(set.frame(src).begin(), set.frame(src).end());
    const auto out = jitter_frame(copy, set.width, set.height, cfg.jitter, jit);
    set.pixels.insert(set.pixels.end(), out.begin(), out.end());
    set.labels.push_back(set.labels[src]);
  }

  std::vector<int> fold(test.size());
  {
    std::vector<std::size_t> idx(test.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng(derive_seed(cfg.seed, {tag("baseline-folds")})).shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) fold[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(cfg.folds));
  }

  Network net(architecture_by_name(cfg.arch, n_classes), derive_seed(cfg.seed, {tag("baseline-init")}));
  Workspace ws(net);
  // correct[e][k]: frames of fold k classified correctly after epoch e.
  std::vector<std::vector<std::size_t>> correct;
  std::vector<std::size_t> fold_size(static_cast<std::size_t>(cfg.folds), 0);
  for (int k : fold) ++fold_size[static_cast<std::size_t>(k)];
  for (int e = 0; e < cfg.epochs; ++e) {
    supervised_pretrain(net, set, {},
                        {1, cfg.lr, cfg.minibatch,
                         derive_seed(cfg.seed, {tag("baseline-epoch"), static_cast<std::uint64_t>(e)})});
    auto& row = correct.emplace_back(static_cast<std::size_t>(cfg.folds), 0);
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (argmax(ws.forward(net, test.frame(i))) == test.labels[i]) ++row[static_cast<std::size_t>(fold[i])];
    }
  }

  BaselineResult res;
  const std::size_t total = test.size();
  for (int k = 0; k < cfg.folds; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    std::size_t best = 0;
    for (std::size_t e = 1; e < correct.size(); ++e) {
      if (correct[e][kk] > correct[best][kk]) best = e;
    }
    const std::size_t all = std::accumulate(correct[best].begin(), correct[best].end(), std::size_t{0});
    res.fold_epoch.push_back(static_cast<int>(best) + 1);
    res.fold_accuracy.push_back(static_cast<double>(all - correct[best][kk]) /
                                static_cast<double>(total - fold_size[kk]));
  }
  res.mean_accuracy = std::accumulate(res.fold_accuracy.begin(), res.fold_accuracy.end(), 0.0) /
                      static_cast<double>(cfg.folds);
  return res;
}

NorbSplit load_norb_split(const std::string& dir) {
  const auto to_set = [](const std::vector<NorbRecord>& records) {
    FrameSet set;
    for (const auto& r : records) set.append(r.image, r.category);
    return set;
  };
  const std::string train = dir + "/smallnorb-5x46789x9x18x6x2x96x96-training-";
  const std::string test = dir + "/smallnorb-5x01235x9x18x6x2x96x96-testing-";
  return {to_set(load_norb(train + "dat.mat", train + "cat.mat", train + "info.mat", 3)),
          to_set(load_norb(test + "dat.mat", test + "cat.mat", test + "info.mat", 3))};
}

}  // namespace sst
