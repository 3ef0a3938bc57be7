// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sst/cli.hpp"

using namespace sst;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sst_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

// Keeps end-to-end commands fast: three short batches, compact net.
const std::vector<std::string> kSmall = {"--batches", "3", "--walk-length", "6", "--arch", "compact",
                                         "--pretrain-epochs", "2", "--pretrain-lr", "0.05"};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("usage errors exit 2 with one error line and the usage text") {
  const auto r = run({"gen-benchmark", "--out", "x", "--frobnicate"});
  CHECK(r.code == 2);
  CHECK(first_line(r.err).starts_with("error: UsageError: "));
  CHECK(r.err.find("Usage:") != std::string::npos);

  CHECK(run({}).code == 2);
  CHECK(run({"gen-benchmark"}).code == 2);  // --out missing
  CHECK(run({"experiment", "--strategy", "sst-z"}).code == 2);
  CHECK(run({"experiment", "--classes", "7"}).code == 2);
  CHECK(run({"gen-benchmark", "--out", "x", "--batches", "1"}).code == 2);
  CHECK(run({"--isa", "sse9", "gradcheck"}).code == 2);
}

TEST_CASE("help exits 0") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("gen-benchmark") != std::string::npos);
  CHECK(run({"experiment", "--help"}).out.find("--tune-lr") != std::string::npos);
}

TEST_CASE("gen-benchmark writes manifests and a verification report, reproducibly") {
  const auto a = scratch("gen_a"), b = scratch("gen_b");
  const auto r = run({"gen-benchmark", "--mindist", "2", "--seed", "1", "--out", a.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("status ok") != std::string::npos);
  CHECK(fs::exists(a / "train_01.txt"));
  CHECK(fs::exists(a / "test_10.txt"));
  CHECK(slurp(a / "verification.txt").find("violations 0") != std::string::npos);

  REQUIRE(run({"gen-benchmark", "--mindist", "2", "--seed", "1", "--out", b.string()}).code == 0);
  for (const auto& e : fs::directory_iterator(a)) CHECK(slurp(e.path()) == slurp(b / e.path().filename()));

  const auto v = run({"verify-mindist", "--bench", a.string(), "--mindist", "2"});
  CHECK(v.code == 0);
  const auto bad = run({"verify-mindist", "--bench", a.string(), "--mindist", "4"});
  CHECK(bad.code == 3);
  CHECK(first_line(bad.err).starts_with("error: DataError: "));
  CHECK(bad.out.find("violation object") != std::string::npos);

  CHECK(run({"gen-benchmark", "--recipe", "native", "--out", scratch("gen_native").string()}).code == 0);
  const auto coil = scratch("gen_coil");
  CHECK(run({"gen-benchmark", "--recipe", "coil", "--out", coil.string()}).code == 0);
  CHECK(fs::exists(coil / "train_10.txt"));
}

TEST_CASE("missing inputs are data errors") {
  const auto r = run({"verify-mindist", "--bench", (fs::temp_directory_path() / "sst_cli_nothing_here").string()});
  CHECK(r.code == 3);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK(run({"report", "--in", "/nonexistent/report.csv"}).code == 3);
  CHECK(run({"eval", "--net", "/nonexistent/net.ckpt", "--batches", "3"}).code == 3);
  CHECK(run({"experiment", "--recipe", "coil"}).code == 2);  // needs --coil-dir
}

TEST_CASE("pretrain, tune and eval chain through checkpoints") {
  const auto d = scratch("chain");
  const auto net = (d / "net.ckpt").string(), tuned = (d / "tuned.ckpt").string();
  const auto p = run(cat({"pretrain", "--out", net}, kSmall));
  REQUIRE(p.code == 0);
  CHECK(p.out.find("test_accuracy") != std::string::npos);
  const std::vector<std::string> bench = {"--batches", "3", "--walk-length", "6"};
  const auto t = run(cat({"tune", "--net", net, "--batch", "2", "--strategy", "supt", "--epochs-per-batch", "1",
                          "--tune-lr", "0.001", "--out", tuned}, bench));
  REQUIRE(t.code == 0);
  CHECK(t.out.find("skips 0") != std::string::npos);
  const auto e1 = run(cat({"eval", "--net", tuned}, bench));
  const auto e2 = run(cat({"eval", "--net", tuned}, bench));
  CHECK(e1.code == 0);
  CHECK(e1.out == e2.out);
  CHECK(e1.out.starts_with("accuracy,entropy_bits\n"));
  CHECK(run(cat({"tune", "--net", net, "--batch", "4", "--out", tuned}, bench)).code == 2);
}

TEST_CASE("experiment: config file, flag override, byte-identical reruns, SupTR lambda 1") {
  const auto d = scratch("exp");
  {
    std::ofstream cfg(d / "exp.cfg");
    cfg << "# small run\nbatches = 3\nwalk-length = 6\narch = compact\npretrain-epochs = 2\n"
           "pretrain-lr = 0.05\nruns = 2\nepochs-per-batch = 1\ntune-lr = 0.001\nstrategy = sst-a\n";
  }
  const auto c = (d / "exp.cfg").string();
  const auto a = run({"experiment", "--config", c, "--strategy", "supt", "--lambda", "1.0", "--out", (d / "a.csv").string()});
  REQUIRE(a.code == 0);
  const auto csv = slurp(d / "a.csv");
  CHECK(csv.starts_with("run,checkpoint,train_batch,accuracy,entropy_bits\n"));
  CHECK(csv.find("\n2,3,") != std::string::npos);  // two runs, three checkpoints
  CHECK(csv.find("\n3,1,") == std::string::npos);

  REQUIRE(run({"experiment", "--config", c, "--strategy", "supt", "--lambda", "1.0", "--jobs", "2", "--out",
               (d / "b.csv").string()})
              .code == 0);
  CHECK(slurp(d / "b.csv") == csv);

  REQUIRE(run({"experiment", "--config", c, "--strategy", "suptr", "--lambda", "1.0", "--out", (d / "r.csv").string()})
              .code == 0);
  CHECK(slurp(d / "r.csv") == csv);

  // Config value used when no flag is given: sst-a differs from supt.
  REQUIRE(run({"experiment", "--config", c, "--out", (d / "s.csv").string()}).code == 0);
  CHECK(slurp(d / "s.csv") != csv);

  const auto rep = run({"report", "--in", (d / "a.csv").string()});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("runs: 2") != std::string::npos);

  {
    std::ofstream bad(d / "bad.cfg");
    bad << "runs = 2\nno-such-flag = 1\n";
  }
  CHECK(run({"experiment", "--config", (d / "bad.cfg").string()}).code == 2);
  {
    std::ofstream bad(d / "broken.cfg");
    bad << "runs 2\n";
  }
  const auto broken = run({"experiment", "--config", (d / "broken.cfg").string()});
  CHECK(broken.code == 3);
  CHECK(first_line(broken.err).starts_with("error: ParseError: "));
}

TEST_CASE("divergence exits 4") {
  const auto r = run(cat({"experiment", "--runs", "1", "--strategy", "supt", "--tune-lr", "1e6", "--epochs-per-batch", "1"},
                         kSmall));
  CHECK(r.code == 4);
  CHECK(first_line(r.err).starts_with("error: Divergence"));
}

TEST_CASE("gradcheck") {
  const auto r = run({"gradcheck", "--nets", "5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("worst") != std::string::npos);
  CHECK(run({"gradcheck", "--nets", "2", "--tolerance", "1e-30"}).code == 3);
  CHECK(run({"--isa", "scalar", "gradcheck", "--nets", "2"}).code == 0);
}
