// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numeric>

#include "sst/baseline.hpp"
#include "sst/benchmark.hpp"
#include "sst/config.hpp"
#include "sst/errors.hpp"
#include "sst/experiment.hpp"
#include "sst/report.hpp"

using namespace sst;
namespace fs = std::filesystem;

namespace {

// Three short batches per split keep every test well under a second or two.
const BenchmarkData& small_data() {
  static const BenchmarkData data = [] {
    BenchmarkConfig cfg;
    cfg.n_batches = 3;
    cfg.walk.length = 6;
    return build_benchmark(make_layout(cfg), ToySource(), ClassMode::five);
  }();
  return data;
}

ExperimentConfig small_config(StrategyKind kind) {
  ExperimentConfig cfg;
  cfg.strategy = kind;
  cfg.runs = 2;
  cfg.epochs_per_batch = 2;
  cfg.pretrain_epochs = 3;
  cfg.pretrain_lr = 0.05;
  cfg.tune_lr = 0.001;
  cfg.arch = "compact";
  return cfg;
}

FrameSet constant_labels(const FrameSet& src, int label) {
  FrameSet out = src;
  std::fill(out.labels.begin(), out.labels.end(), label);
  return out;
}

}  // namespace

TEST_CASE("label noise") {
  std::vector<int> labels(1000);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 5);
  CHECK(inject_label_noise(labels, 0.0, 5, 1) == labels);

  const auto all = inject_label_noise(labels, 1.0, 5, 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(all[i] != labels[i]);
    CHECK((all[i] >= 0 && all[i] < 5));
  }
  const auto some = inject_label_noise(labels, 0.2, 5, 1);
  int changed = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) changed += some[i] != labels[i];
  CHECK(changed == 200);
  CHECK(inject_label_noise(labels, 0.2, 5, 1) == some);
  CHECK(inject_label_noise(labels, 0.2, 5, 2) != some);
  CHECK_THROWS_AS(inject_label_noise(labels, 1.5, 5, 1), UsageError);
}

TEST_CASE("frame accuracy") {
  const auto& test = small_data().test;
  // Always answers class 2.
  Network net({LayerSpec::full(5)}, 0);
  net.fill(0.0);
  net.params()[0].bias = {0, 0, 1, 0, 0};
  CHECK(evaluate_frame_accuracy(net, constant_labels(test, 2)) == 1.0);
  CHECK(evaluate_frame_accuracy(net, constant_labels(test, 3)) == 0.0);
  // Constant outputs tie everywhere; the lowest index wins.
  net.params()[0].bias = {0.5, 0.5, 0.5, 0.5, 0.5};
  const double chance = static_cast<double>(std::count(test.labels.begin(), test.labels.end(), 0)) /
                        static_cast<double>(test.size());
  CHECK(evaluate_frame_accuracy(net, test) == chance);
  CHECK(chance == doctest::Approx(0.2));
  CHECK_THROWS_AS(evaluate_frame_accuracy(net, FrameSet{}), UsageError);
}

TEST_CASE("entropy report") {
  const auto& test = small_data().test;
  Network net({LayerSpec::full(5)}, 0);
  net.fill(0.0);
  CHECK(entropy_report(net, test) == doctest::Approx(std::log2(5.0)).epsilon(1e-14));
  net.params()[0].bias = {0, 1, 0, 0, 0};
  CHECK(entropy_report(net, test) == 0.0);
}

TEST_CASE("supervised pre-training") {
  const auto& data = small_data();
  const auto& b1 = data.train.front();
  Network net(compact_architecture(5), 3);
  const Network init = net;
  CHECK(supervised_pretrain(net, b1, {}, {0, 0.05, 10, 1}).empty());
  CHECK(net == init);

  const auto losses = supervised_pretrain(net, b1, {}, {8, 0.05, 10, 1});
  REQUIRE(losses.size() == 8);
  CHECK(losses.back() < losses.front());
  CHECK(evaluate_frame_accuracy(net, data.test) > 0.2 + 0.1);

  // Paired run with half the labels wrong.
  Network noisy = init;
  const auto bad = inject_label_noise(b1.labels, 0.5, 5, 7);
  supervised_pretrain(noisy, b1, bad, {8, 0.05, 10, 1});
  CHECK(evaluate_frame_accuracy(noisy, data.test) < evaluate_frame_accuracy(net, data.test));

  Network diverge = init;
  CHECK_THROWS_AS(supervised_pretrain(diverge, b1, {}, {3, 1e6, 10, 1}), DivergenceError);
}

TEST_CASE("tune_on_batch no-op cases") {
  const auto& data = small_data();
  Network net(compact_architecture(5), 4);
  supervised_pretrain(net, data.train.front(), {}, {2, 0.05, 10, 1});
  const Network before = net;

  StrategyConfig never;
  never.sc = 1.01;
  for (auto kind : {StrategyKind::SST_A, StrategyKind::SST_A_Delta, StrategyKind::SST_A_Delta_noTC}) {
    const auto stats = tune_on_batch(net, data.train[1], {kind, never, 3, 0.01});
    CHECK(stats.updates == 0);
    CHECK(stats.skips == 3 * data.train[1].size());
    CHECK(net == before);
  }
  tune_on_batch(net, data.train[1], {StrategyKind::SupT, StrategyConfig{}, 1, 0.0});
  CHECK(net == before);

  StrategyConfig wrong;
  wrong.n_w = 4;
  CHECK_THROWS_AS(tune_on_batch(net, data.train[1], {StrategyKind::SupT, wrong, 1, 0.01}), UsageError);
}

TEST_CASE("SupT tuning lowers the loss of every batch") {
  const auto& data = small_data();
  Network net(compact_architecture(5), 5);
  supervised_pretrain(net, data.train.front(), {}, {3, 0.05, 10, 1});
  for (std::size_t b = 1; b < data.train.size(); ++b) {
    const auto stats = tune_on_batch(net, data.train[b], {StrategyKind::SupT, StrategyConfig{}, 5, 0.002});
    CHECK(stats.epoch_loss.back() < stats.epoch_loss.front());
    CHECK(stats.updates == 5 * data.train[b].size());
  }
}

TEST_CASE("SST-B tuning changes the network") {
  const auto& data = small_data();
  Network net(compact_architecture(5), 6);
  supervised_pretrain(net, data.train.front(), {}, {3, 0.05, 10, 1});
  const Network before = net;
  const auto stats = tune_on_batch(net, data.train[1], {StrategyKind::SST_B, StrategyConfig{}, 1, 0.001});
  CHECK(stats.skips == 1);  // only the first frame of the flow
  CHECK(net != before);
}

TEST_CASE("aggregate statistics") {
  std::vector<RunResult> runs(4);
  const double acc[] = {0.5, 0.6, 0.7, 0.8};
  for (int r = 0; r < 4; ++r) runs[static_cast<std::size_t>(r)].accuracy_at = {0.4, acc[r]};
  const auto agg = aggregate(runs);
  CHECK(agg.runs == 4);
  CHECK(agg.checkpoints[0].std == 0.0);
  CHECK(agg.checkpoints[1].mean == doctest::Approx(0.65));
  const double sd = std::sqrt((0.0225 + 0.0025 + 0.0025 + 0.0225) / 3.0);
  CHECK(agg.checkpoints[1].std == doctest::Approx(sd).epsilon(1e-12));
  CHECK(*agg.checkpoints[1].ci95 == doctest::Approx(1.96 * sd / 2.0).epsilon(1e-12));
  CHECK_FALSE(aggregate({runs[0]}).checkpoints[1].ci95.has_value());
}

TEST_CASE("run_experiment: shape, determinism, shared checkpoint 1") {
  const auto& data = small_data();
  auto cfg = small_config(StrategyKind::SupT);
  cfg.runs = 1;
  const auto one = run_experiment(cfg, data);
  REQUIRE(one.runs.size() == 1);
  CHECK(one.runs[0].accuracy_at.size() == data.train.size());
  CHECK(one.runs[0].entropy_at.size() == data.train.size());
  CHECK_FALSE(one.aggregate.checkpoints[0].ci95.has_value());

  cfg.runs = 3;
  const auto a = run_experiment(cfg, data);
  const auto b = run_experiment(cfg, data);
  CHECK(format_csv(a) == format_csv(b));
  for (const auto& r : a.runs) {
    auto order = r.batch_order;
    std::sort(order.begin(), order.end());
    CHECK(order == std::vector<int>{2, 3});
    CHECK(r.accuracy_at[0] == a.runs[0].accuracy_at[0]);
  }
  CHECK(a.aggregate.checkpoints[0].std == 0.0);

  cfg.jobs = 3;
  CHECK(format_csv(run_experiment(cfg, data)) == format_csv(a));

  auto sst = small_config(StrategyKind::SST_A);
  sst.runs = 3;
  const auto s = run_experiment(sst, data);
  CHECK(s.runs[0].accuracy_at[0] == a.runs[0].accuracy_at[0]);

  auto fresh = cfg;
  fresh.share_pretrain = false;
  const auto f = run_experiment(fresh, data);
  CHECK(f.runs[0].accuracy_at[0] == a.runs[0].accuracy_at[0]);  // run 0 uses the same pretrain seeds
  CHECK(f.runs[1].accuracy_at[0] != f.runs[0].accuracy_at[0]);
}

TEST_CASE("SupTR with lambda 1 reproduces SupT end to end") {
  const auto& data = small_data();
  auto supt = small_config(StrategyKind::SupT);
  auto suptr = small_config(StrategyKind::SupTR);
  suptr.strategy_cfg.lambda = 1.0;
  CHECK(format_csv(run_experiment(supt, data)) == format_csv(run_experiment(suptr, data)));
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg;
  cfg.runs = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.arch = "lenet9";
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.label_noise = -0.1;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("CSV report round trip and errors") {
  const auto& data = small_data();
  const auto res = run_experiment(small_config(StrategyKind::SupT), data);
  const auto csv = format_csv(res);
  CHECK(csv.starts_with("run,checkpoint,train_batch,accuracy,entropy_bits\n"));
  const auto back = parse_csv(csv);
  CHECK(format_csv(back) == csv);
  CHECK(format_table(back.aggregate).find("runs: 2") != std::string::npos);

  CHECK_THROWS_AS(parse_csv(""), ParseError);
  CHECK_THROWS_AS(parse_csv("run,checkpoint\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("run,checkpoint,train_batch,accuracy,entropy_bits\n1,1,1,zero,0\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("run,checkpoint,train_batch,accuracy,entropy_bits\n1,2,1,0.5,0\n"), ParseError);
}

TEST_CASE("config files") {
  const auto e = parse_config("# header\nstrategy = sst-a\n\n  runs=5   # trailing\ntune-lr = 3e-5\r\n");
  REQUIRE(e.size() == 3);
  CHECK(e[0] == std::pair<std::string, std::string>{"strategy", "sst-a"});
  CHECK(e[1].second == "5");
  CHECK(e[2].second == "3e-5");
  CHECK(parse_config(format_config(e)) == e);

  const auto line_of = [](std::string_view text) -> std::size_t {
    try {
      parse_config(text);
    } catch (const ParseError& err) {
      return err.line();
    }
    return 0;
  };
  CHECK(line_of("runs = 1\nnot a pair\n") == 2);
  CHECK(line_of("runs = 1\nruns = 2\n") == 2);
  CHECK(line_of("runs =\n") == 1);
  CHECK(line_of("Bad Key = 1\n") == 1);
}

TEST_CASE("benchmark layouts") {
  BenchmarkConfig cfg;
  const auto walk = make_layout(cfg);
  CHECK(walk.train.size() == 10);
  CHECK(walk.test.size() == 10);
  CHECK(verify_mindist(walk.train, walk.test, 1).ok);
  CHECK(make_layout(cfg) == walk);

  const auto dir = fs::temp_directory_path() / "sst_test_layout";
  fs::remove_all(dir);
  save_layout(dir.string(), walk);
  const auto back = load_layout(dir.string());
  REQUIRE(back.train.size() == walk.train.size());
  for (std::size_t i = 0; i < walk.train.size(); ++i) CHECK(back.train[i].sequences == walk.train[i].sequences);
  for (std::size_t i = 0; i < walk.test.size(); ++i) CHECK(back.test[i].sequences == walk.test[i].sequences);
  CHECK_THROWS_AS(load_layout((dir / "missing").string()), Error);

  cfg.recipe = Recipe::native;
  const auto native = make_layout(cfg);
  for (const auto& b : native.train) {
    CHECK(b.frame_count() == 1000);
    for (const auto& s : b.sequences) CHECK(s.object_id % 10 < 5);
  }
  for (const auto& b : native.test)
    for (const auto& s : b.sequences) CHECK(s.object_id % 10 >= 5);
  cfg.class_mode = ClassMode::fifty;
  CHECK_THROWS_AS(make_layout(cfg), UsageError);
  cfg = {};
  cfg.recipe = Recipe::coil;
  CHECK_THROWS_AS(make_layout(cfg), UsageError);
  CHECK(parse_recipe("native") == Recipe::native);
  CHECK_THROWS_AS(parse_recipe("stereo"), UsageError);
}

TEST_CASE("coil layout") {
  const auto test_poses = coil_test_poses();
  CHECK(test_poses == std::vector<int>{0, 12, 24, 36, 48, 60});
  const auto train_poses = coil_train_poses();
  CHECK(train_poses.size() == 54);
  for (int p : train_poses)
    for (int t : test_poses) CHECK(std::min((p - t + 72) % 72, (t - p + 72) % 72) >= 2);

  const auto layout = make_coil_layout(10, WalkConfig{}, 1);
  REQUIRE(layout.train.size() == 10);
  for (const auto& batch : layout.train) {
    CHECK(batch.size() == 100);
    std::size_t frames = 0;
    for (const auto& s : batch) frames += s.poses.size();
    CHECK(frames == 1000);
  }
  CHECK(layout.test.size() == 100);

  const auto dir = fs::temp_directory_path() / "sst_test_coil";
  fs::remove_all(dir);
  save_coil_layout(dir.string(), layout);
  const auto back = load_coil_layout(dir.string());
  CHECK(back.train == layout.train);
  CHECK(back.test == layout.test);

  // Tiny synthetic COIL directory: two objects, gray 64x64 images.
  const auto imgs = fs::temp_directory_path() / "sst_test_coil_imgs";
  fs::remove_all(imgs);
  fs::create_directories(imgs);
  for (int k = 1; k <= 2; ++k)
    for (int a = 0; a < 360; a += 5) write_pnm(Image(64, 64, 3, static_cast<std::uint8_t>(k * 50 + a / 5)),
                                               (imgs / ("obj" + std::to_string(k) + "__" + std::to_string(a) + ".ppm")).string());
  const auto src = CoilSource::from_directory(imgs.string());
  CHECK(src.frame(1, 3).width == 32);
  CHECK(src.frame(1, 3).pixels[0] == 103);
  CHECK_THROWS_AS(src.frame(5, 0), IndexOutOfRange);
}

TEST_CASE("jitter keeps shape and is seeded") {
  const auto& frame = small_data().test.frame(0);
  Rng a(1), b(1);
  const auto x = jitter_frame(frame, 32, 32, JitterConfig{}, a);
  CHECK(x.size() == frame.size());
  CHECK(x == jitter_frame(frame, 32, 32, JitterConfig{}, b));
  Rng c(1);
  const auto same = jitter_frame(frame, 32, 32, JitterConfig{0.0, 0.0, 0.0}, c);
  for (std::size_t i = 0; i < same.size(); ++i) CHECK(same[i] == doctest::Approx(frame[i]).epsilon(1e-12));
  for (double v : x) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("baseline protocol on toy data") {
  const auto& data = small_data();
  FrameSet train;
  for (const auto& b : data.train) {
    train.pixels.insert(train.pixels.end(), b.pixels.begin(), b.pixels.end());
    train.labels.insert(train.labels.end(), b.labels.begin(), b.labels.end());
  }
  BaselineConfig cfg;
  cfg.arch = "compact";
  cfg.patterns_per_class = 40;
  cfg.jittered = 100;
  cfg.epochs = 4;
  cfg.minibatch = 20;
  const auto res = run_baseline(train, data.test, 5, cfg);
  REQUIRE(res.fold_accuracy.size() == 5);
  for (double a : res.fold_accuracy) CHECK((a >= 0.0 && a <= 1.0));
  for (int e : res.fold_epoch) CHECK((e >= 1 && e <= 4));
  CHECK(res.mean_accuracy > 0.2);
  cfg.folds = 1;
  CHECK_THROWS_AS(run_baseline(train, data.test, 5, cfg), UsageError);
}
