// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "sst/errors.hpp"
#include "sst/manifest.hpp"
#include "sst/rng.hpp"
#include "sst/varspace.hpp"

using namespace sst;

namespace {

std::string golden(const std::string& name) {
  std::ifstream in(std::string(SST_GOLDEN_DIR) + "/" + name);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Brute-force distance over the explicit grid graph (no closed form).
int bfs_distance(VariationPoint a, VariationPoint b) {
  std::vector<int> dist(kGridSize, -1);
  std::vector<int> queue{a.index()};
  dist[static_cast<std::size_t>(a.index())] = 0;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const auto p = VariationPoint::from_index(queue[q]);
    const VariationPoint ns[] = {{p.elevation - 1, p.azimuth, p.lighting}, {p.elevation + 1, p.azimuth, p.lighting},
                                 {p.elevation, (p.azimuth + 17) % 18, p.lighting},
                                 {p.elevation, (p.azimuth + 1) % 18, p.lighting},
                                 {p.elevation, p.azimuth, p.lighting - 1}, {p.elevation, p.azimuth, p.lighting + 1}};
    for (const auto& n : ns) {
      if (!n.valid() || dist[static_cast<std::size_t>(n.index())] >= 0) continue;
      dist[static_cast<std::size_t>(n.index())] = dist[static_cast<std::size_t>(p.index())] + 1;
      queue.push_back(n.index());
    }
  }
  return dist[static_cast<std::size_t>(b.index())];
}

}  // namespace

TEST_CASE("splitmix64 matches the published reference stream") {
  // Reference outputs of splitmix64 seeded with 1234567.
  std::uint64_t x = 1234567;
  const std::uint64_t expect[] = {6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL};
  for (auto e : expect) {
    x += 0x9E3779B97F4A7C15ULL;
    CHECK(splitmix64_mix(x) == e);
  }
}

TEST_CASE("Rng stream equals the independent reference implementation") {
  std::istringstream in(golden("rng_1234567.txt"));
  Rng rng(1234567);
  std::uint64_t v;
  int n = 0;
  while (in >> v) {
    CHECK(rng.next() == v);
    ++n;
  }
  CHECK(n == 8);
}

TEST_CASE("Rng helpers stay in range") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.below(7) < 7);
  }
  std::vector<int> v(20);
  for (int i = 0; i < 20; ++i) v[static_cast<std::size_t>(i)] = i;
  rng.shuffle(v);
  CHECK(std::set<int>(v.begin(), v.end()).size() == 20);
  CHECK(derive_seed(1, {2}) != derive_seed(1, {3}));
  CHECK(tag("train") != tag("test"));
}

TEST_CASE("cityblock distance") {
  CHECK(cityblock_distance({0, 0, 0}, {0, 0, 0}) == 0);
  CHECK(cityblock_distance({2, 5, 1}, {4, 5, 3}) == 4);
  CHECK(cityblock_distance({0, 17, 0}, {0, 0, 0}) == 1);
  CHECK(cityblock_distance({0, 0, 0}, {0, 9, 0}) == 9);
}

TEST_CASE("cityblock distance equals grid-graph BFS distance") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto a = VariationPoint::from_index(static_cast<int>(rng.below(kGridSize)));
    const auto b = VariationPoint::from_index(static_cast<int>(rng.below(kGridSize)));
    CHECK(cityblock_distance(a, b) == bfs_distance(a, b));
  }
}

TEST_CASE("point index round trip") {
  for (int i = 0; i < kGridSize; ++i) CHECK(VariationPoint::from_index(i).index() == i);
}

TEST_CASE("random walk contract") {
  WalkConfig cfg;
  cfg.length = 1;
  CHECK(random_walk(cfg, {4, 9, 2}) == std::vector<VariationPoint>{{4, 9, 2}});

  cfg.length = 20;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    cfg.seed = seed;
    const auto w = random_walk(cfg, VariationPoint::from_index(static_cast<int>(seed * 5 % kGridSize)));
    REQUIRE(w.size() == 20);
    for (std::size_t t = 1; t < w.size(); ++t) {
      CHECK(w[t].valid());
      CHECK(cityblock_distance(w[t - 1], w[t]) == 1);
    }
  }
}

TEST_CASE("random walk golden sequence, seed 7 from (4,0,2)") {
  WalkConfig cfg;
  cfg.seed = 7;
  FrameSequence seq{0, random_walk(cfg, {4, 0, 2})};
  CHECK(write_manifest({seq}) == golden("walk_seed7.txt"));
}

TEST_CASE("walk with a single active dimension moves only that dimension") {
  WalkConfig cfg;
  cfg.dim_step_prob = {0.0, 1.0, 0.0};
  cfg.length = 40;
  cfg.seed = 5;
  const auto w = random_walk(cfg, {3, 0, 3});
  for (const auto& p : w) {
    CHECK(p.elevation == 3);
    CHECK(p.lighting == 3);
  }
}

TEST_CASE("walk config validation") {
  WalkConfig cfg;
  cfg.dim_step_prob = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.flip_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.length = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  CHECK_THROWS_AS(random_walk(WalkConfig{}, {9, 0, 0}), UsageError);
}

TEST_CASE("training batches: 10 x 1000 frames, one sequence per object") {
  const auto train = generate_train_batches(10, WalkConfig{}, 1);
  REQUIRE(train.size() == 10);
  for (const auto& b : train) {
    CHECK(b.frame_count() == 1000);
    CHECK(b.sequences.size() == 50);
    CHECK(b.kind == BatchKind::train);
  }
  const auto one = generate_train_batches(1, WalkConfig{}, 1);
  CHECK(one.size() == 1);
  CHECK(one[0].sequences.size() == 50);
  CHECK(generate_train_batches(10, WalkConfig{}, 1) == train);
  CHECK(generate_train_batches(10, WalkConfig{}, 2) != train);
}

TEST_CASE("test batches respect mindist for 1..4") {
  const auto train = generate_train_batches(10, WalkConfig{}, 1);
  for (int mindist = 1; mindist <= 4; ++mindist) {
    const auto test = generate_test_batches(train, mindist, WalkConfig{}, 99);
    REQUIRE(test.size() == 10);
    for (const auto& b : test) CHECK(b.frame_count() == 1000);
    const auto report = verify_mindist(train, test, mindist);
    CHECK(report.ok);
    CHECK(report.violations.empty());
    CHECK(report.comparisons > 0);
  }
}

TEST_CASE("allowed points agree with brute force") {
  const auto train = generate_train_batches(2, WalkConfig{}, 4, 3);
  const auto allowed = allowed_points(train, 2, 3);
  for (int obj = 0; obj < 3; ++obj) {
    for (int i = 0; i < kGridSize; ++i) {
      int best = 1 << 20;
      const auto p = VariationPoint::from_index(i);
      for (const auto& b : train) {
        for (const auto& s : b.sequences) {
          if (s.object_id != obj) continue;
          for (const auto& q : s.points) best = std::min(best, cityblock_distance(p, q));
        }
      }
      CHECK(allowed[static_cast<std::size_t>(obj)][static_cast<std::size_t>(i)] == (best >= 2));
    }
  }
}

TEST_CASE("full training coverage leaves no room for test walks") {
  Batch all;
  FrameSequence seq{0, {}};
  for (int i = 0; i < kGridSize; ++i) seq.points.push_back(VariationPoint::from_index(i));
  all.sequences.push_back(seq);
  CHECK_THROWS_AS(generate_test_batches({all}, 1, WalkConfig{}, 1, 1, 1), InfeasibleRegion);
}

TEST_CASE("verify_mindist reports violations and accepts disjoint halves") {
  Batch train, test;
  train.sequences.push_back({0, {{0, 0, 0}, {0, 1, 0}}});
  test.sequences.push_back({0, {{8, 9, 5}, {8, 10, 5}}});
  test.kind = BatchKind::test;
  CHECK(verify_mindist({train}, {test}, 1).ok);

  test.sequences[0].points.push_back({0, 1, 0});
  const auto r = verify_mindist({train}, {test}, 1);
  CHECK_FALSE(r.ok);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].distance == 0);
  CHECK(r.violations[0].test_point == VariationPoint{0, 1, 0});
  // Same pose on another object is not a violation.
  test.sequences[0].object_id = 1;
  CHECK(verify_mindist({train}, {test}, 1).ok);
}

TEST_CASE("class modes") {
  CHECK(class_of(37, ClassMode::five) == 3);
  CHECK(class_of(37, ClassMode::fifty) == 37);
}
