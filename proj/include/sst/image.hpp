// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sst {

/// 8-bit image, interleaved channels, row-major.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c = 1, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill) {}

  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                      static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                      static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Block mean over factor x factor tiles, rounded half up. Throws NonDivisible.
Image downsample_box(const Image& image, int factor);

/// Luma (299 R + 587 G + 114 B) / 1000, rounded half up, in integer arithmetic.
/// Throws DimensionMismatch unless the image has 3 channels.
Image rgb_to_gray(const Image& image);

/// Binary PGM (P5) or PPM (P6) with maxval <= 255. Comments are allowed in
/// the header. Throws BadMagic, TruncatedFile, DimensionMismatch.
Image decode_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pnm(const Image& image);
Image read_pnm(const std::string& path);
void write_pnm(const Image& image, const std::string& path);

/// Pixels scaled to [0, 1] (value / 255) for a single-channel image.
std::vector<double> to_unit_range(const Image& image);

}  // namespace sst
