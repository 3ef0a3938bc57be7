// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Deterministic synthetic stand-in for small-NORB: 5 shape families x 10
// objects, each rendered at every pose of the 9 x 18 x 6 variation grid.

#include <cstdint>

#include "sst/image.hpp"
#include "sst/varspace.hpp"

namespace sst {

struct ToyDatasetSpec {
  int n_classes = 5;
  int objects_per_class = 10;
  int size = 32;
  std::uint64_t seed = 20260101;
  /// Amplitude of the per-pixel background noise, in [0,1] intensity units.
  double noise = 0.06;

  int n_objects() const noexcept { return n_classes * objects_per_class; }
  /// Throws UsageError.
  void validate() const;
};

/// Class families, by object_id / objects_per_class.
enum class ToyShape { ellipse = 0, rectangle = 1, cross = 2, annulus = 3, triangle = 4 };

ToyShape toy_shape(const ToyDatasetSpec& spec, int object_id);

/// Pure function of (spec, object, pose). Elevation moves the object
/// vertically and foreshortens it, azimuth rotates it in 20 degree steps
/// (any integer azimuth is accepted and reduced modulo 18), lighting scales
/// brightness and turns the shading direction. Throws IndexOutOfRange for an
/// unknown object or an out-of-grid elevation/lighting.
Image render_toy(const ToyDatasetSpec& spec, int object_id, const VariationPoint& point);

}  // namespace sst
