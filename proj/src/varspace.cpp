// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/varspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <string>
#include <unordered_set>

#include "sst/errors.hpp"
#include "sst/rng.hpp"

namespace sst {
namespace {

constexpr std::array<int, 3> kDimSize{kElevations, kAzimuths, kLightings};

int& coord(VariationPoint& p, int dim) {
  return dim == 0 ? p.elevation : dim == 1 ? p.azimuth : p.lighting;
}

// Moves `p` one step along `dim` in direction `dir`. Azimuth wraps; the others
// reflect, flipping `dir` in place.
void step(VariationPoint& p, int dim, int& dir) {
  int& c = coord(p, dim);
  if (dim == 1) {
    c = (c + dir + kAzimuths) % kAzimuths;
    return;
  }
  int next = c + dir;
  if (next < 0 || next >= kDimSize[dim]) {
    dir = -dir;
    next = c + dir;
  }
  c = next;
}

int choose_dim(Rng& rng, const std::array<double, 3>& prob) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last = 0;
  for (int d = 0; d < 3; ++d) {
    if (prob[d] <= 0.0) continue;
    acc += prob[d];
    last = d;
    if (u < acc) return d;
  }
  return last;
}

std::array<int, 3> initial_directions(Rng& rng) {
  std::array<int, 3> dir{};
  for (int& d : dir) d = rng.bernoulli(0.5) ? 1 : -1;
  return dir;
}

// In-grid neighbours in fixed order: elevation -/+, azimuth -/+, lighting -/+.
int neighbours(const VariationPoint& p, std::array<VariationPoint, 6>& out,
               std::array<std::pair<int, int>, 6>& moves) {
  int n = 0;
  for (int dim = 0; dim < 3; ++dim) {
    for (int dir : {-1, 1}) {
      VariationPoint q = p;
      int& c = coord(q, dim);
      if (dim == 1) {
        c = (c + dir + kAzimuths) % kAzimuths;
      } else {
        c += dir;
        if (c < 0 || c >= kDimSize[dim]) continue;
      }
      out[n] = q;
      moves[n] = {dim, dir};
      ++n;
    }
  }
  return n;
}

std::uint64_t train_sequence_seed(std::uint64_t master, int batch, int object) {
  return derive_seed(master, {tag("train"), static_cast<std::uint64_t>(batch),
                              static_cast<std::uint64_t>(object)});
}

}  // namespace

int cityblock_distance(const VariationPoint& a, const VariationPoint& b) noexcept {
  const int da = std::abs(a.azimuth - b.azimuth);
  return std::abs(a.elevation - b.elevation) + std::min(da, kAzimuths - da) +
         std::abs(a.lighting - b.lighting);
}

void WalkConfig::validate() const {
  if (length < 1) throw UsageError("walk length must be >= 1");
  double sum = 0.0;
  for (double p : dim_step_prob) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("dim_step_prob entries must be in [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw UsageError("dim_step_prob must sum to 1");
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw UsageError("flip_prob must be in [0,1]");
}

int class_of(int object_id, ClassMode mode) noexcept {
  return mode == ClassMode::five ? object_id / kObjectsPerClass : object_id;
}

std::size_t Batch::frame_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.points.size();
  return n;
}

std::vector<VariationPoint> random_walk(const WalkConfig& cfg, const VariationPoint& start) {
  cfg.validate();
  if (!start.valid()) throw UsageError("walk start outside the variation grid");
  Rng rng(cfg.seed);
  auto dir = initial_directions(rng);
  std::vector<VariationPoint> points;
  points.reserve(static_cast<std::size_t>(cfg.length));
  points.push_back(start);
  VariationPoint p = start;
  for (int t = 1; t < cfg.length; ++t) {
    const int d = choose_dim(rng, cfg.dim_step_prob);
    if (rng.bernoulli(cfg.flip_prob)) dir[d] = -dir[d];
    step(p, d, dir[d]);
    points.push_back(p);
  }
  return points;
}

std::vector<Batch> generate_walk_batches(int n_batches, const std::vector<int>& objects,
                                         int walks_per_object, const WalkConfig& per_object_walk,
                                         std::uint64_t master_seed, BatchKind kind) {
  if (n_batches < 1) throw UsageError("n_batches must be >= 1");
  if (walks_per_object < 1) throw UsageError("walks_per_object must be >= 1");
  per_object_walk.validate();
  std::vector<Batch> batches;
  batches.reserve(static_cast<std::size_t>(n_batches));
  for (int b = 1; b <= n_batches; ++b) {
    Batch batch;
    batch.kind = kind;
    batch.index = b;
    for (int obj : objects) {
      for (int rep = 0; rep < walks_per_object; ++rep) {
        std::uint64_t s = train_sequence_seed(master_seed, b, obj);
        if (rep > 0) s = derive_seed(s, {tag("rep"), static_cast<std::uint64_t>(rep)});
        Rng start_rng(derive_seed(s, {0}));
        const auto start = VariationPoint::from_index(static_cast<int>(start_rng.below(kGridSize)));
        WalkConfig cfg = per_object_walk;
        cfg.seed = derive_seed(s, {1});
        batch.sequences.push_back({obj, random_walk(cfg, start)});
      }
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<Batch> generate_train_batches(int n_batches, const WalkConfig& per_object_walk,
                                          std::uint64_t master_seed, int n_objects) {
  std::vector<int> objects(static_cast<std::size_t>(std::max(n_objects, 0)));
  for (int i = 0; i < n_objects; ++i) objects[static_cast<std::size_t>(i)] = i;
  return generate_walk_batches(n_batches, objects, 1, per_object_walk, master_seed, BatchKind::train);
}

std::vector<std::vector<bool>> allowed_points(const std::vector<Batch>& train, int mindist,
                                              int n_objects) {
  // Multi-source BFS on the grid graph; its hop distance is exactly the
  // city-block distance with circular azimuth.
  std::vector<std::vector<int>> dist(static_cast<std::size_t>(n_objects),
                                     std::vector<int>(kGridSize, -1));
  std::vector<std::deque<int>> frontier(static_cast<std::size_t>(n_objects));
  for (const auto& batch : train) {
    for (const auto& seq : batch.sequences) {
      if (seq.object_id < 0 || seq.object_id >= n_objects) continue;
      auto& d = dist[static_cast<std::size_t>(seq.object_id)];
      for (const auto& p : seq.points) {
        if (d[p.index()] != 0) {
          d[p.index()] = 0;
          frontier[static_cast<std::size_t>(seq.object_id)].push_back(p.index());
        }
      }
    }
  }
  std::vector<std::vector<bool>> allowed(static_cast<std::size_t>(n_objects),
                                         std::vector<bool>(kGridSize, true));
  std::array<VariationPoint, 6> nb{};
  std::array<std::pair<int, int>, 6> mv{};
  for (int obj = 0; obj < n_objects; ++obj) {
    auto& d = dist[static_cast<std::size_t>(obj)];
    auto& q = frontier[static_cast<std::size_t>(obj)];
    while (!q.empty()) {
      const int i = q.front();
      q.pop_front();
      const int n = neighbours(VariationPoint::from_index(i), nb, mv);
      for (int k = 0; k < n; ++k) {
        const int j = nb[static_cast<std::size_t>(k)].index();
        if (d[j] < 0) {
          d[j] = d[i] + 1;
          q.push_back(j);
        }
      }
    }
    for (int i = 0; i < kGridSize; ++i) {
      // Unreached points (object absent from training) are unconstrained.
      allowed[static_cast<std::size_t>(obj)][static_cast<std::size_t>(i)] =
          d[i] < 0 || d[i] >= mindist;
    }
  }
  return allowed;
}

std::vector<Batch> generate_test_batches(const std::vector<Batch>& train, int mindist,
                                         const WalkConfig& cfg, std::uint64_t seed,
                                         int n_batches, int n_objects) {
  if (train.empty()) throw UsageError("test generation needs training batches");
  if (mindist < 1) throw UsageError("mindist must be >= 1");
  if (n_batches < 1) throw UsageError("n_batches must be >= 1");
  cfg.validate();

  const auto allowed = allowed_points(train, mindist, n_objects);
  std::vector<std::vector<int>> allowed_list(static_cast<std::size_t>(n_objects));
  for (int obj = 0; obj < n_objects; ++obj) {
    for (int i = 0; i < kGridSize; ++i) {
      if (allowed[static_cast<std::size_t>(obj)][static_cast<std::size_t>(i)]) {
        allowed_list[static_cast<std::size_t>(obj)].push_back(i);
      }
    }
    if (allowed_list[static_cast<std::size_t>(obj)].empty()) {
      throw InfeasibleRegion("object " + std::to_string(obj) + ": no grid point at distance >= " +
                             std::to_string(mindist) + " from its training frames");
    }
  }

  std::array<VariationPoint, 6> nb{};
  std::array<std::pair<int, int>, 6> mv{};
  std::vector<Batch> batches;
  for (int b = 1; b <= n_batches; ++b) {
    Batch batch;
    batch.kind = BatchKind::test;
    batch.index = b;
    for (int obj = 0; obj < n_objects; ++obj) {
      const auto& ok = allowed[static_cast<std::size_t>(obj)];
      const auto& pool = allowed_list[static_cast<std::size_t>(obj)];
      Rng rng(derive_seed(seed, {tag("test"), static_cast<std::uint64_t>(mindist),
                                 static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(obj)}));
      std::vector<VariationPoint> points;
      int restarts = 0;
      for (;;) {
        points.clear();
        VariationPoint p = VariationPoint::from_index(pool[rng.below(pool.size())]);
        auto dir = initial_directions(rng);
        points.push_back(p);
        bool dead_end = false;
        while (static_cast<int>(points.size()) < cfg.length) {
          const int d = choose_dim(rng, cfg.dim_step_prob);
          if (rng.bernoulli(cfg.flip_prob)) dir[d] = -dir[d];
          VariationPoint c = p;
          int cdir = dir[d];
          step(c, d, cdir);
          if (ok[static_cast<std::size_t>(c.index())]) {
            dir[d] = cdir;
            p = c;
          } else {
            // Masked: pick uniformly among the allowed neighbours instead.
            std::array<int, 6> open{};
            int n_open = 0;
            const int n = neighbours(p, nb, mv);
            for (int k = 0; k < n; ++k) {
              if (ok[static_cast<std::size_t>(nb[static_cast<std::size_t>(k)].index())]) {
                open[static_cast<std::size_t>(n_open++)] = k;
              }
            }
            if (n_open == 0) {
              dead_end = true;
              break;
            }
            const int k = open[rng.below(static_cast<std::uint64_t>(n_open))];
            dir[mv[static_cast<std::size_t>(k)].first] = mv[static_cast<std::size_t>(k)].second;
            p = nb[static_cast<std::size_t>(k)];
          }
          points.push_back(p);
        }
        if (!dead_end) break;
        if (++restarts > kMaxWalkRestarts) {
          throw InfeasibleRegion("object " + std::to_string(obj) + ": no " +
                                 std::to_string(cfg.length) + "-frame walk found at mindist " +
                                 std::to_string(mindist) + " after " +
                                 std::to_string(kMaxWalkRestarts) + " restarts");
        }
      }
      batch.sequences.push_back({obj, points});
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

MindistReport verify_mindist(const std::vector<Batch>& train, const std::vector<Batch>& test,
                             int mindist) {
  MindistReport report;
  // Group training points per object first; the comparison itself is the
  // plain exhaustive double loop.
  std::vector<std::vector<VariationPoint>> train_points;
  for (const auto& batch : train) {
    for (const auto& seq : batch.sequences) {
      if (seq.object_id < 0) continue;
      if (static_cast<std::size_t>(seq.object_id) >= train_points.size()) {
        train_points.resize(static_cast<std::size_t>(seq.object_id) + 1);
      }
      auto& dst = train_points[static_cast<std::size_t>(seq.object_id)];
      dst.insert(dst.end(), seq.points.begin(), seq.points.end());
    }
  }
  for (const auto& batch : test) {
    for (const auto& seq : batch.sequences) {
      if (seq.object_id < 0 || static_cast<std::size_t>(seq.object_id) >= train_points.size()) {
        continue;
      }
      const auto& tp = train_points[static_cast<std::size_t>(seq.object_id)];
      for (const auto& p : seq.points) {
        for (const auto& q : tp) {
          ++report.comparisons;
          const int d = cityblock_distance(p, q);
          if (d < mindist) report.violations.push_back({seq.object_id, batch.index, p, q, d});
        }
      }
    }
  }
  report.ok = report.violations.empty();
  return report;
}

std::size_t unique_frame_count(const std::vector<Batch>& batches) {
  std::unordered_set<int> seen;
  for (const auto& batch : batches) {
    for (const auto& seq : batch.sequences) {
      for (const auto& p : seq.points) seen.insert(seq.object_id * kGridSize + p.index());
    }
  }
  return seen.size();
}

}  // namespace sst
