// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sst/benchmark.hpp"
#include "sst/checkpoint.hpp"
#include "sst/config.hpp"
#include "sst/errors.hpp"
#include "sst/experiment.hpp"
#include "sst/report.hpp"
#include "sst/rng.hpp"
#include "sst/simd.hpp"

namespace sst {
namespace {

namespace fs = std::filesystem;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Benchmark selection shared by every data-touching command.
struct BenchOptions {
  std::string bench_dir;
  std::string recipe = "walk";
  int batches = 10;
  int mindist = 1;
  std::uint64_t seed = 1;
  int walk_length = 20;
  double flip_prob = 0.2;
  int classes = 5;
  std::string norb_dir;
  std::string coil_dir;
  double toy_noise = ToyDatasetSpec{}.noise;
  std::uint64_t toy_seed = ToyDatasetSpec{}.seed;

  void add_to(CLI::App& app) {
    app.add_option("--bench", bench_dir, "Load manifests written by gen-benchmark instead of generating them");
    app.add_option("--recipe", recipe, "walk, native or coil")->check(CLI::IsMember({"walk", "native", "coil"}));
    app.add_option("--batches", batches, "Number of training (and test) batches");
    app.add_option("--mindist", mindist, "Minimum city-block distance between test and training poses");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--walk-length", walk_length, "Frames per sequence");
    app.add_option("--flip-prob", flip_prob, "Probability of reversing direction at each step");
    app.add_option("--classes", classes, "5 (categories) or 50 (objects)")->check(CLI::IsMember({5, 50}));
    app.add_option("--norb-dir", norb_dir, "Directory with the six small-NORB files (default: synthetic toy set)");
    app.add_option("--coil-dir", coil_dir, "Directory with COIL-100 images (coil recipe)");
    app.add_option("--toy-noise", toy_noise, "Pixel noise amplitude of the toy set");
    app.add_option("--toy-seed", toy_seed, "Seed of the toy set");
  }

  BenchmarkConfig config() const {
    BenchmarkConfig cfg;
    cfg.recipe = parse_recipe(recipe);
    cfg.n_batches = batches;
    cfg.mindist = mindist;
    cfg.seed = seed;
    cfg.walk.length = walk_length;
    cfg.walk.flip_prob = flip_prob;
    cfg.class_mode = classes == 50 ? ClassMode::fifty : ClassMode::five;
    if (cfg.recipe != Recipe::coil) cfg.validate();
    return cfg;
  }

  ToyDatasetSpec toy() const {
    ToyDatasetSpec t;
    t.noise = toy_noise;
    t.seed = toy_seed;
    t.validate();
    return t;
  }

  void validate() const {
    const auto cfg = config();
    if (cfg.recipe == Recipe::coil) {
      if (batches < 2) throw UsageError("batches must be >= 2");
      cfg.walk.validate();
    } else {
      toy();
    }
  }

  BenchmarkData load() const {
    const auto cfg = config();
    if (cfg.recipe == Recipe::coil) {
      if (coil_dir.empty()) throw UsageError("the coil recipe needs --coil-dir");
      const auto layout = bench_dir.empty() ? make_coil_layout(cfg.n_batches, cfg.walk, cfg.seed)
                                            : load_coil_layout(bench_dir);
      return build_coil_benchmark(layout, CoilSource::from_directory(coil_dir));
    }
    const auto layout = bench_dir.empty() ? make_layout(cfg) : load_layout(bench_dir);
    if (!norb_dir.empty()) return build_benchmark(layout, NorbSource::from_directory(norb_dir), cfg.class_mode);
    return build_benchmark(layout, ToySource(toy()), cfg.class_mode);
  }
};

struct TrainOptions {
  std::string arch = "default";
  int pretrain_epochs = ExperimentConfig{}.pretrain_epochs;
  double pretrain_lr = ExperimentConfig{}.pretrain_lr;
  int pretrain_minibatch = ExperimentConfig{}.pretrain_minibatch;
  double label_noise = 0.0;

  void add_to(CLI::App& app) {
    app.add_option("--arch", arch, "default or compact")->check(CLI::IsMember({"default", "compact"}));
    app.add_option("--pretrain-epochs", pretrain_epochs, "Epochs of supervised pre-training on TrainB1");
    app.add_option("--pretrain-lr", pretrain_lr, "Pre-training learning rate");
    app.add_option("--pretrain-minibatch", pretrain_minibatch, "Pre-training mini-batch size");
    app.add_option("--label-noise", label_noise, "Fraction of TrainB1 labels replaced by a wrong class");
  }
};

struct TuneOptions {
  std::string strategy = "sst-a";
  int epochs_per_batch = ExperimentConfig{}.epochs_per_batch;
  double tune_lr = ExperimentConfig{}.tune_lr;
  double sc = StrategyConfig{}.sc;
  double lambda = StrategyConfig{}.lambda;

  void add_to(CLI::App& app) {
    app.add_option("--strategy", strategy, "supt, suptr, sst-b, sst-a, sst-a-delta, sst-a-delta-notc");
    app.add_option("--epochs-per-batch", epochs_per_batch, "Passes over each tuning batch");
    app.add_option("--tune-lr", tune_lr, "Tuning learning rate (online SGD)");
    app.add_option("--sc", sc, "Self-confidence threshold");
    app.add_option("--lambda", lambda, "SupTR label weight");
  }

  StrategyConfig strategy_config(int n_w) const {
    StrategyConfig s;
    s.sc = sc;
    s.lambda = lambda;
    s.n_w = n_w;
    s.validate();
    return s;
  }
};

// Appends `--key=value` for config entries whose option was not given on the
// command line.
std::vector<std::string> merge_config(CLI::App& app, const std::vector<std::string>& args) {
  CLI::App* sub = nullptr;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!sub) {
      for (auto* s : app.get_subcommands([](CLI::App*) { return true; })) {
        if (s->get_name() == args[i]) sub = s;
      }
      continue;
    }
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].starts_with("--config=")) config_path = args[i].substr(9);
  }
  if (!sub || config_path.empty()) return args;

  const auto option_of = [&](const std::string& name) -> const CLI::Option* {
    if (const auto* o = sub->get_option_no_throw(name)) return o;
    return app.get_option_no_throw(name);
  };
  std::vector<const CLI::Option*> given;
  for (const auto& a : args) {
    if (!a.starts_with("--")) continue;
    if (const auto* o = option_of(a.substr(0, a.find('=')))) given.push_back(o);
  }
  std::vector<std::string> out = args;
  for (const auto& [key, value] : load_config(config_path)) {
    const auto* o = option_of("--" + key);
    if (!o || key == "config") throw UsageError("config '" + config_path + "': unknown key '" + key + "'");
    if (std::find(given.begin(), given.end(), o) != given.end()) continue;
    // Top-level options must precede the subcommand name.
    if (sub->get_option_no_throw("--" + key)) {
      out.push_back("--" + key + "=" + value);
    } else {
      out.insert(out.begin(), "--" + key + "=" + value);
    }
  }
  return out;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
  if (dynamic_cast<const NonFiniteGradient*>(&e)) return "NonFiniteGradient";
  if (dynamic_cast<const DivergenceDetected*>(&e)) return "DivergenceDetected";
  if (dynamic_cast<const DivergenceError*>(&e)) return "DivergenceError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const BadMagic*>(&e)) return "BadMagic";
  if (dynamic_cast<const TruncatedFile*>(&e)) return "TruncatedFile";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const NonDivisible*>(&e)) return "NonDivisible";
  if (dynamic_cast<const InfeasibleRegion*>(&e)) return "InfeasibleRegion";
  if (dynamic_cast<const InconsistentArchitecture*>(&e)) return "InconsistentArchitecture";
  if (dynamic_cast<const ShapeMismatch*>(&e)) return "ShapeMismatch";
  if (dynamic_cast<const IndexOutOfRange*>(&e)) return "IndexOutOfRange";
  if (dynamic_cast<const Error*>(&e)) return "DataError";
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return "DataError";
  return "InternalError";
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string mindist_report(const BenchmarkConfig& cfg, const BenchmarkLayout& layout, const MindistReport* check) {
  std::size_t train_frames = 0, test_frames = 0;
  for (const auto& b : layout.train) train_frames += b.frame_count();
  for (const auto& b : layout.test) test_frames += b.frame_count();
  std::string r;
  r += "recipe " + std::string(to_string(cfg.recipe)) + "\n";
  r += "seed " + std::to_string(cfg.seed) + "\n";
  r += "train_batches " + std::to_string(layout.train.size()) + "\n";
  r += "test_batches " + std::to_string(layout.test.size()) + "\n";
  r += "train_frames " + std::to_string(train_frames) + "\n";
  r += "train_unique_frames " + std::to_string(unique_frame_count(layout.train)) + "\n";
  r += "test_frames " + std::to_string(test_frames) + "\n";
  r += "test_unique_frames " + std::to_string(unique_frame_count(layout.test)) + "\n";
  if (check) {
    r += "mindist " + std::to_string(cfg.mindist) + "\n";
    r += "comparisons " + std::to_string(check->comparisons) + "\n";
    r += "violations " + std::to_string(check->violations.size()) + "\n";
    r += std::string("status ") + (check->ok ? "ok" : "FAILED") + "\n";
  }
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sstlab: incremental semi-supervised tuning experiments", "sstlab"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel variant: auto, scalar, avx2, neon")
      ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));

  BenchOptions bench;
  TrainOptions train;
  TuneOptions tune;
  std::string config_path, out_path, in_path, net_path;
  int runs = ExperimentConfig{}.runs;
  int jobs = 1;
  bool share = true;
  bool table = false;
  int batch_index = 2;
  int gc_nets = 20;
  double gc_eps = 1e-4, gc_tol = 1e-4;
  std::uint64_t gc_seed = 1;
  std::size_t gc_max_params = 1000;

  const auto add_config = [&](CLI::App* s) {
    s->add_option("--config", config_path, "key = value file; command-line flags win");
  };

  auto* gen = app.add_subcommand("gen-benchmark", "Write train/test manifests and a verification report");
  bench.add_to(*gen);
  gen->add_option("--out", out_path, "Output directory")->required();
  add_config(gen);

  auto* pre = app.add_subcommand("pretrain", "Supervised pre-training on TrainB1, writes a checkpoint");
  bench.add_to(*pre);
  train.add_to(*pre);
  pre->add_option("--out", out_path, "Checkpoint path")->required();
  add_config(pre);

  auto* tun = app.add_subcommand("tune", "Tune a checkpoint on one training batch");
  bench.add_to(*tun);
  tune.add_to(*tun);
  tun->add_option("--net", net_path, "Input checkpoint")->required();
  tun->add_option("--batch", batch_index, "1-based training batch to tune on");
  tun->add_option("--out", out_path, "Output checkpoint")->required();
  add_config(tun);

  auto* ev = app.add_subcommand("eval", "Frame accuracy and output entropy on the test set");
  bench.add_to(*ev);
  ev->add_option("--net", net_path, "Checkpoint")->required();
  add_config(ev);

  auto* exp = app.add_subcommand("experiment", "Full incremental protocol over several runs, CSV report");
  bench.add_to(*exp);
  train.add_to(*exp);
  tune.add_to(*exp);
  exp->add_option("--runs", runs, "Independent runs (batch orders)");
  exp->add_option("--jobs", jobs, "Runs executed in parallel");
  exp->add_flag("--share-pretrain,!--no-share-pretrain", share, "All runs start from one pre-trained network");
  exp->add_option("--out", out_path, "CSV path (default: standard output)");
  exp->add_flag("--table", table, "Also print the aggregate table");
  add_config(exp);

  auto* ver = app.add_subcommand("verify-mindist", "Exhaustive mindist check of saved manifests");
  ver->add_option("--bench", bench.bench_dir, "Directory written by gen-benchmark")->required();
  ver->add_option("--mindist", bench.mindist, "Distance to verify");
  add_config(ver);

  auto* rep = app.add_subcommand("report", "Render an experiment CSV as a table");
  rep->add_option("--in", in_path, "Experiment CSV")->required();
  add_config(rep);

  auto* gc = app.add_subcommand("gradcheck", "Backprop vs central differences on random small networks");
  gc->add_option("--nets", gc_nets, "Number of random networks");
  gc->add_option("--seed", gc_seed, "Seed");
  gc->add_option("--eps", gc_eps, "Finite-difference step");
  gc->add_option("--tolerance", gc_tol, "Maximum accepted relative error");
  gc->add_option("--max-params", gc_max_params, "Parameters checked per network");
  add_config(gc);

  const auto fail = [&](const std::string& kind, const std::string& msg, int code) {
    err << "error: " << kind << ": " << one_line(msg) << "\n";
    if (code == kExitUsage) err << "\n" << app.help();
    return code;
  };

  try {
    auto merged = merge_config(app, args);
    std::reverse(merged.begin(), merged.end());  // CLI11 consumes from the back
    try {
      app.parse(merged);
    } catch (const CLI::CallForHelp&) {
      auto* sel = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
      out << sel->help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      return fail("UsageError", e.what(), kExitUsage);
    }

    simd::set_isa(isa == "auto" ? simd::best_isa() : simd::parse_isa(isa));

    if (gen->parsed()) {
      bench.validate();
      const auto cfg = bench.config();
      if (cfg.recipe == Recipe::coil) {
        const auto layout = make_coil_layout(cfg.n_batches, cfg.walk, cfg.seed);
        save_coil_layout(out_path, layout);
        std::string r = "recipe coil\nseed " + std::to_string(cfg.seed) + "\ntrain_batches " +
                        std::to_string(layout.train.size()) + "\ntest_sequences " +
                        std::to_string(layout.test.size()) + "\n";
        write_file((fs::path(out_path) / "verification.txt").string(), r);
        out << r;
        return kExitOk;
      }
      const auto layout = make_layout(cfg);
      std::optional<MindistReport> check;
      if (cfg.recipe == Recipe::walk) check = verify_mindist(layout.train, layout.test, cfg.mindist);
      save_layout(out_path, layout);
      const std::string r = mindist_report(cfg, layout, check ? &*check : nullptr);
      write_file((fs::path(out_path) / "verification.txt").string(), r);
      out << r;
      if (check && !check->ok) throw Error("generated test batches violate mindist");
      return kExitOk;
    }

    if (ver->parsed()) {
      if (bench.mindist < 0) throw UsageError("mindist must be >= 0");
      const auto layout = load_layout(bench.bench_dir);
      const auto check = verify_mindist(layout.train, layout.test, bench.mindist);
      BenchmarkConfig cfg;
      cfg.mindist = bench.mindist;
      std::string r = mindist_report(cfg, layout, &check);
      r = r.substr(r.find('\n') + 1);  // recipe and seed are not recorded in manifests
      r = r.substr(r.find('\n') + 1);
      out << r;
      constexpr std::size_t kShown = 20;
      for (std::size_t i = 0; i < std::min(kShown, check.violations.size()); ++i) {
        const auto& v = check.violations[i];
        out << "violation object " << v.object_id << " test_batch " << v.test_batch << " "
            << format_frame_id(v.object_id, v.test_point) << " vs " << format_frame_id(v.object_id, v.train_point)
            << " distance " << v.distance << "\n";
      }
      if (!check.ok) throw Error(std::to_string(check.violations.size()) + " mindist violations");
      return kExitOk;
    }

    if (rep->parsed()) {
      out << format_table(parse_csv(read_file(in_path)).aggregate);
      return kExitOk;
    }

    if (gc->parsed()) {
      if (gc_nets < 1) throw UsageError("nets must be >= 1");
      if (!(gc_eps > 0.0) || !(gc_tol > 0.0)) throw UsageError("eps and tolerance must be > 0");
      double worst = 0.0;
      out << "net,parameters,max_relative_error\n";
      for (int i = 0; i < gc_nets; ++i) {
        const auto c = random_gradcheck_case(derive_seed(gc_seed, {tag("gradcheck"), static_cast<std::uint64_t>(i)}));
        const double e = gradient_check(c.net, c.input, c.target, gc_eps, gc_max_params,
                                        derive_seed(gc_seed, {tag("gradcheck-sample"), static_cast<std::uint64_t>(i)}));
        worst = std::max(worst, e);
        out << i + 1 << "," << c.net.trainable_parameter_count() << "," << sci(e) << "\n";
      }
      out << "worst " << sci(worst) << " tolerance " << sci(gc_tol) << "\n";
      if (!(worst <= gc_tol)) throw Error("gradient check failed: " + sci(worst) + " > " + sci(gc_tol));
      return kExitOk;
    }

    bench.validate();

    if (pre->parsed()) {
      ExperimentConfig cfg;
      cfg.arch = train.arch;
      cfg.pretrain_epochs = train.pretrain_epochs;
      cfg.pretrain_lr = train.pretrain_lr;
      cfg.pretrain_minibatch = train.pretrain_minibatch;
      cfg.label_noise = train.label_noise;
      cfg.seed = bench.seed;
      cfg.validate();
      const auto data = bench.load();
      const Network net = pretrained_network(cfg, data);
      save_checkpoint(net, out_path);
      out << "train_frames " << data.train.front().size() << "\n";
      out << "test_accuracy " << fixed6(evaluate_frame_accuracy(net, data.test)) << "\n";
      return kExitOk;
    }

    if (tun->parsed()) {
      const auto kind = parse_strategy(tune.strategy);
      if (tune.epochs_per_batch < 0) throw UsageError("epochs-per-batch must be >= 0");
      if (!(tune.tune_lr >= 0.0)) throw UsageError("tune-lr must be >= 0");
      if (batch_index < 1 || batch_index > bench.batches) throw UsageError("batch outside 1..batches");
      Network net = load_checkpoint(net_path);
      const auto data = bench.load();
      const auto stats = tune_on_batch(net, data.train.at(static_cast<std::size_t>(batch_index - 1)),
                                       {kind, tune.strategy_config(data.n_classes), tune.epochs_per_batch, tune.tune_lr});
      save_checkpoint(net, out_path);
      out << "updates " << stats.updates << "\nskips " << stats.skips << "\n";
      if (!stats.epoch_loss.empty()) out << "last_epoch_loss " << fixed6(stats.epoch_loss.back()) << "\n";
      out << "test_accuracy " << fixed6(evaluate_frame_accuracy(net, data.test)) << "\n";
      return kExitOk;
    }

    if (ev->parsed()) {
      const Network net = load_checkpoint(net_path);
      const auto data = bench.load();
      out << "accuracy,entropy_bits\n"
          << fixed6(evaluate_frame_accuracy(net, data.test)) << "," << fixed6(entropy_report(net, data.test)) << "\n";
      return kExitOk;
    }

    if (exp->parsed()) {
      ExperimentConfig cfg;
      cfg.strategy = parse_strategy(tune.strategy);
      cfg.runs = runs;
      cfg.epochs_per_batch = tune.epochs_per_batch;
      cfg.pretrain_epochs = train.pretrain_epochs;
      cfg.pretrain_lr = train.pretrain_lr;
      cfg.pretrain_minibatch = train.pretrain_minibatch;
      cfg.tune_lr = tune.tune_lr;
      cfg.label_noise = train.label_noise;
      cfg.share_pretrain = share;
      cfg.arch = train.arch;
      cfg.seed = bench.seed;
      cfg.jobs = jobs;
      cfg.strategy_cfg = tune.strategy_config(bench.classes);
      cfg.validate();
      const auto data = bench.load();
      cfg.strategy_cfg.n_w = data.n_classes;
      const auto result = run_experiment(cfg, data);
      const std::string csv = format_csv(result);
      if (out_path.empty()) {
        out << csv;
      } else {
        write_file(out_path, csv);
      }
      if (table) out << format_table(result.aggregate);
      return kExitOk;
    }
    return fail("UsageError", "no command", kExitUsage);
  } catch (const UsageError& e) {
    return fail("UsageError", e.what(), kExitUsage);
  } catch (const DivergenceError& e) {
    return fail(error_kind(e), e.what(), kExitDivergence);
  } catch (const std::exception& e) {
    return fail(error_kind(e), e.what(), kExitData);
  }
}

}  // namespace sst
