// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sst/errors.hpp"

namespace sst {
namespace {

// Reads a non-negative decimal at the cursor.
bool take_int(std::string_view& s, int& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first == last || *first < '0' || *first > '9') return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{}) return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - first));
  return true;
}

bool take_lit(std::string_view& s, std::string_view lit) {
  if (!s.starts_with(lit)) return false;
  s.remove_prefix(lit.size());
  return true;
}

// Calls on_frame(line_text, line_no) per frame and on_break() between blocks.
template <typename Frame, typename Break>
void scan_lines(std::string_view text, Frame on_frame, Break on_break) {
  std::size_t line_no = 0;
  bool in_block = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (line.empty()) {
      if (in_block) on_break();
      in_block = false;
      continue;
    }
    in_block = true;
    on_frame(line, line_no);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_frame_id(int object_id, const VariationPoint& p) {
  return "object" + std::to_string(object_id) + "_e" + std::to_string(p.elevation) + "_a" +
         std::to_string(p.azimuth) + "_l" + std::to_string(p.lighting);
}

FrameId parse_frame_id(std::string_view text, std::size_t line) {
  std::string_view s = text;
  FrameId id{};
  if (!(take_lit(s, "object") && take_int(s, id.object_id) && take_lit(s, "_e") &&
        take_int(s, id.point.elevation) && take_lit(s, "_a") && take_int(s, id.point.azimuth) &&
        take_lit(s, "_l") && take_int(s, id.point.lighting) && s.empty())) {
    throw ParseError(line, "malformed frame id '" + std::string(text) + "'");
  }
  if (!id.point.valid()) throw ParseError(line, "pose outside the variation grid in '" + std::string(text) + "'");
  return id;
}

std::string write_manifest(const std::vector<FrameSequence>& sequences) {
  std::string out;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& seq = sequences[i];
    if (seq.points.empty()) throw UsageError("cannot write an empty sequence to a manifest");
    if (i > 0) out += '\n';
    for (const auto& p : seq.points) {
      out += format_frame_id(seq.object_id, p);
      out += '\n';
    }
  }
  return out;
}

std::vector<FrameSequence> read_manifest(std::string_view text) {
  std::vector<FrameSequence> seqs;
  bool open = false;
  scan_lines(
      text,
      [&](std::string_view line, std::size_t no) {
        const FrameId id = parse_frame_id(line, no);
        if (!open) {
          seqs.push_back({id.object_id, {}});
          open = true;
        } else {
          auto& seq = seqs.back();
          if (seq.object_id != id.object_id) {
            throw ParseError(no, "object changes inside a sequence (missing blank line?)");
          }
          if (cityblock_distance(seq.points.back(), id.point) != 1) {
            throw ParseError(no, "frame is not one grid step from its predecessor");
          }
        }
        seqs.back().points.push_back(id.point);
      },
      [&] { open = false; });
  return seqs;
}

void save_manifest(const std::string& path, const std::vector<FrameSequence>& sequences) {
  const std::string text = write_manifest(sequences);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

std::vector<FrameSequence> load_manifest(const std::string& path) { return read_manifest(read_text(path)); }

std::string write_coil_manifest(const std::vector<CoilSequence>& sequences) {
  std::string out;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (sequences[i].poses.empty()) throw UsageError("cannot write an empty sequence to a manifest");
    if (i > 0) out += '\n';
    for (int pose : sequences[i].poses) {
      out += "object" + std::to_string(sequences[i].object_id) + "_p" + std::to_string(pose) + "\n";
    }
  }
  return out;
}

std::vector<CoilSequence> read_coil_manifest(std::string_view text) {
  std::vector<CoilSequence> seqs;
  bool open = false;
  scan_lines(
      text,
      [&](std::string_view line, std::size_t no) {
        std::string_view s = line;
        int obj = 0, pose = 0;
        if (!(take_lit(s, "object") && take_int(s, obj) && take_lit(s, "_p") && take_int(s, pose) && s.empty())) {
          throw ParseError(no, "malformed frame id '" + std::string(line) + "'");
        }
        if (pose >= kCoilPoses) throw ParseError(no, "pose " + std::to_string(pose) + " outside [0,72)");
        if (!open) {
          seqs.push_back({obj, {}});
          open = true;
        } else if (seqs.back().object_id != obj) {
          throw ParseError(no, "object changes inside a sequence (missing blank line?)");
        }
        seqs.back().poses.push_back(pose);
      },
      [&] { open = false; });
  return seqs;
}

}  // namespace sst
