// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Plain-text sequence manifests.
//
// One frame per line, sequences separated by a blank line:
//
//   object12_e3_a17_l0
//   object12_e3_a0_l0
//
//   object13_e8_a4_l5
//
// Frame ids name the object and its (elevation, azimuth step, lighting)
// pose. Consecutive frames of a sequence must share the object and lie one
// grid step apart. COIL manifests use `object<id>_p<pose>` instead, with pose
// in 5 degree steps.

#include <string>
#include <string_view>
#include <vector>

#include "sst/varspace.hpp"

namespace sst {

std::string format_frame_id(int object_id, const VariationPoint& p);

struct FrameId {
  int object_id;
  VariationPoint point;
};

/// Throws ParseError carrying `line`.
FrameId parse_frame_id(std::string_view text, std::size_t line = 0);

std::string write_manifest(const std::vector<FrameSequence>& sequences);
/// Accepts LF or CRLF; repeated blank lines count as one separator.
std::vector<FrameSequence> read_manifest(std::string_view text);

void save_manifest(const std::string& path, const std::vector<FrameSequence>& sequences);
std::vector<FrameSequence> load_manifest(const std::string& path);

inline constexpr int kCoilPoses = 72;

struct CoilSequence {
  int object_id = 0;
  std::vector<int> poses;  // 0..71, angle = 5 * pose degrees

  friend bool operator==(const CoilSequence&, const CoilSequence&) = default;
};

std::string write_coil_manifest(const std::vector<CoilSequence>& sequences);
std::vector<CoilSequence> read_coil_manifest(std::string_view text);

}  // namespace sst
