// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/image.hpp"

#include <cctype>
#include <string>

#include "binio.hpp"
#include "sst/errors.hpp"

namespace sst {

Image downsample_box(const Image& image, int factor) {
  if (factor < 1 || image.width % factor != 0 || image.height % factor != 0) {
    throw NonDivisible("image " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                       " is not divisible by factor " + std::to_string(factor));
  }
  Image out(image.width / factor, image.height / factor, image.channels);
  const unsigned n = static_cast<unsigned>(factor * factor);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        unsigned sum = 0;
        for (int dy = 0; dy < factor; ++dy) {
          for (int dx = 0; dx < factor; ++dx) sum += image.at(x * factor + dx, y * factor + dy, c);
        }
        out.at(x, y, c) = static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
      }
    }
  }
  return out;
}

Image rgb_to_gray(const Image& image) {
  if (image.channels != 3) {
    throw DimensionMismatch("rgb_to_gray expects 3 channels, got " + std::to_string(image.channels));
  }
  Image out(image.width, image.height, 1);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const unsigned v = 299u * image.at(x, y, 0) + 587u * image.at(x, y, 1) + 114u * image.at(x, y, 2);
      out.at(x, y) = static_cast<std::uint8_t>((v + 500u) / 1000u);
    }
  }
  return out;
}

namespace {

class HeaderScanner {
 public:
  explicit HeaderScanner(std::span<const std::uint8_t> b) : b_(b) {}

  // Skips whitespace and '#' comments, then parses a decimal integer.
  long number() {
    for (;;) {
      if (pos_ >= b_.size()) throw TruncatedFile("pnm: header ends early");
      const char c = static_cast<char>(b_[pos_]);
      if (c == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    if (!std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      throw DimensionMismatch("pnm: expected a number in the header");
    }
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000) throw DimensionMismatch("pnm: header value too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  void end_of_header() {
    if (pos_ >= b_.size()) throw TruncatedFile("pnm: no raster data");
    if (!std::isspace(static_cast<unsigned char>(b_[pos_]))) throw DimensionMismatch("pnm: malformed header");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

Image decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw BadMagic("not a binary PGM/PPM file (expected P5 or P6)");
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  HeaderScanner h(bytes);
  h.skip(2);
  const long w = h.number();
  const long ht = h.number();
  const long maxval = h.number();
  h.end_of_header();
  if (w < 1 || ht < 1) throw DimensionMismatch("pnm: empty image");
  if (maxval < 1 || maxval > 255) throw DimensionMismatch("pnm: only 8-bit images are supported");
  Image img(static_cast<int>(w), static_cast<int>(ht), channels);
  if (bytes.size() - h.pos() < img.pixels.size()) {
    throw TruncatedFile("pnm: raster needs " + std::to_string(img.pixels.size()) + " bytes, " +
                        std::to_string(bytes.size() - h.pos()) + " present");
  }
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const unsigned v = bytes[h.pos() + i];
    // Rescale to 0..255 when maxval is smaller.
    img.pixels[i] = maxval == 255 ? static_cast<std::uint8_t>(v)
                                  : static_cast<std::uint8_t>((v * 255u * 2u + static_cast<unsigned>(maxval)) /
                                                              (2u * static_cast<unsigned>(maxval)));
  }
  return img;
}

std::vector<std::uint8_t> encode_pnm(const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw DimensionMismatch("pnm supports 1 or 3 channels");
  }
  const std::string header = std::string(image.channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

Image read_pnm(const std::string& path) { return decode_pnm(detail::read_file_bytes(path)); }

void write_pnm(const Image& image, const std::string& path) {
  detail::write_file_bytes(path, encode_pnm(image));
}

std::vector<double> to_unit_range(const Image& image) {
  std::vector<double> v(image.pixels.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = image.pixels[i] / 255.0;
  return v;
}

}  // namespace sst
