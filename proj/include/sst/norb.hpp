// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// small-NORB binary matrix files.
//
// Each file is: i32 magic, i32 ndim, max(3, ndim) x i32 dimension sizes, then
// the row-major payload, all little-endian. Magic 0x1E3D4C55 marks a byte
// matrix, 0x1E3D4C54 an int32 matrix. The dataset ships three files per split:
//   -dat  : byte  N x 2 x 96 x 96 (stereo pairs, left eye first)
//   -cat  : int32 N               (category 0..4)
//   -info : int32 N x 4           (instance 0..9, elevation 0..8,
//                                  azimuth 0,2,..,34, lighting 0..5)

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sst/image.hpp"
#include "sst/varspace.hpp"

namespace sst {

inline constexpr std::int32_t kNorbByteMagic = 0x1E3D4C55;
inline constexpr std::int32_t kNorbIntMagic = 0x1E3D4C54;

struct NorbRecord {
  Image image;  // left eye, grayscale
  int category = 0;
  int instance = 0;
  int elevation = 0;
  int azimuth = 0;  // step index 0..17 (file value / 2)
  int lighting = 0;

  int object_id() const noexcept { return category * kObjectsPerClass + instance; }
  VariationPoint point() const noexcept { return {elevation, azimuth, lighting}; }
  friend bool operator==(const NorbRecord&, const NorbRecord&) = default;
};

/// Parses one split from in-memory files. The left image is box-downsampled
/// by `downsample` (1 keeps 96x96, 3 gives 32x32). Throws BadMagic,
/// TruncatedFile, DimensionMismatch.
std::vector<NorbRecord> decode_norb(std::span<const std::uint8_t> dat,
                                    std::span<const std::uint8_t> cat,
                                    std::span<const std::uint8_t> info, int downsample = 1);

std::vector<NorbRecord> load_norb(const std::string& dat_path, const std::string& cat_path,
                                  const std::string& info_path, int downsample = 1);

struct NorbFiles {
  std::vector<std::uint8_t> dat, cat, info;
};

/// Writes records in the same layout. Both eyes receive the stored image.
/// Images must all share one square size.
NorbFiles encode_norb(const std::vector<NorbRecord>& records);

}  // namespace sst
