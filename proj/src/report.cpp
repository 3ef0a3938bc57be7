// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/report.hpp"

#include <charconv>
#include <cstdio>
#include <map>

#include "sst/errors.hpp"

namespace sst {
namespace {

constexpr std::string_view kRunHeader = "run,checkpoint,train_batch,accuracy,entropy_bits";
constexpr std::string_view kAggHeader = "checkpoint,mean,std,ci95_half_width,runs";

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto c = line.find(',');
    out.push_back(line.substr(0, c));
    if (c == std::string_view::npos) return out;
    line.remove_prefix(c + 1);
  }
}

template <typename T>
T number(std::string_view s, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_csv(const ExperimentResult& result) {
  std::string out(kRunHeader);
  out += '\n';
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const auto& run = result.runs[r];
    for (std::size_t c = 0; c < run.accuracy_at.size(); ++c) {
      const int batch = c == 0 ? 1 : run.batch_order.at(c - 1);
      out += std::to_string(r + 1) + "," + std::to_string(c + 1) + "," + std::to_string(batch) + "," +
             fixed6(run.accuracy_at[c]) + "," + fixed6(run.entropy_at.at(c)) + "\n";
    }
  }
  out += '\n';
  out += kAggHeader;
  out += '\n';
  const auto& agg = result.aggregate;
  for (std::size_t c = 0; c < agg.checkpoints.size(); ++c) {
    const auto& s = agg.checkpoints[c];
    out += std::to_string(c + 1) + "," + fixed6(s.mean) + "," + fixed6(s.std) + "," +
           (s.ci95 ? fixed6(*s.ci95) : std::string()) + "," + std::to_string(agg.runs) + "\n";
  }
  return out;
}

ExperimentResult parse_csv(std::string_view text) {
  ExperimentResult res;
  std::map<int, RunResult> runs;
  enum { want_run_header, runs_block, want_agg_header, agg_block } state = want_run_header;
  std::size_t no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++no;
    if (line.ends_with('\r')) line.remove_suffix(1);
    switch (state) {
      case want_run_header:
        if (line != kRunHeader) throw ParseError(no, "expected header '" + std::string(kRunHeader) + "'");
        state = runs_block;
        break;
      case runs_block: {
        if (line.empty()) {
          state = want_agg_header;
          break;
        }
        const auto f = split(line);
        if (f.size() != 5) throw ParseError(no, "expected 5 fields");
        auto& run = runs[number<int>(f[0], no)];
        const int ck = number<int>(f[1], no);
        if (ck != static_cast<int>(run.accuracy_at.size()) + 1) throw ParseError(no, "checkpoints out of order");
        if (ck > 1) run.batch_order.push_back(number<int>(f[2], no));
        run.accuracy_at.push_back(number<double>(f[3], no));
        run.entropy_at.push_back(number<double>(f[4], no));
        break;
      }
      case want_agg_header:
        if (line != kAggHeader) throw ParseError(no, "expected header '" + std::string(kAggHeader) + "'");
        state = agg_block;
        break;
      case agg_block: {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 5) throw ParseError(no, "expected 5 fields");
        CheckpointStats s;
        s.mean = number<double>(f[1], no);
        s.std = number<double>(f[2], no);
        if (!f[3].empty()) s.ci95 = number<double>(f[3], no);
        res.aggregate.runs = number<int>(f[4], no);
        res.aggregate.checkpoints.push_back(s);
        break;
      }
    }
  }
  if (state == want_run_header) throw ParseError(no, "empty report");
  for (auto& [id, run] : runs) res.runs.push_back(std::move(run));
  if (res.aggregate.checkpoints.empty()) res.aggregate = aggregate(res.runs);
  return res;
}

std::string format_table(const AggregateResult& agg) {
  std::string out = "checkpoint      mean       std      ci95  accuracy\n";
  for (std::size_t c = 0; c < agg.checkpoints.size(); ++c) {
    const auto& s = agg.checkpoints[c];
    char ci[32] = "-";
    if (s.ci95) std::snprintf(ci, sizeof ci, "%.4f", *s.ci95);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%10zu  %8.4f  %8.4f  %8s  ", c + 1, s.mean, s.std, ci);
    out += buf;
    out += std::string(static_cast<std::size_t>(s.mean * 40.0 + 0.5), '#');
    out += '\n';
  }
  out += "runs: " + std::to_string(agg.runs) + "\n";
  return out;
}

}  // namespace sst
