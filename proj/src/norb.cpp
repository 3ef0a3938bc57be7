// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/norb.hpp"

#include <algorithm>
#include <cstdio>

#include "binio.hpp"
#include "sst/errors.hpp"

namespace sst {
namespace {

struct MatrixHeader {
  std::int32_t magic = 0;
  std::vector<std::int64_t> dims;

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= static_cast<std::size_t>(d);
    return n;
  }
};

MatrixHeader read_header(detail::ByteReader& r, std::int32_t expected_magic, const std::string& what) {
  MatrixHeader h;
  h.magic = r.i32();
  if (h.magic != expected_magic) {
    throw BadMagic(what + ": magic 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%08X", static_cast<unsigned>(h.magic));
      return std::string(buf);
    }() + " is not a small-NORB " + (expected_magic == kNorbByteMagic ? "byte" : "int32") + " matrix");
  }
  const std::int32_t ndim = r.i32();
  if (ndim < 1 || ndim > 16) throw DimensionMismatch(what + ": bad dimension count " + std::to_string(ndim));
  const int stored = std::max(3, ndim);
  for (int i = 0; i < stored; ++i) {
    const std::int32_t d = r.i32();
    if (i < ndim) {
      if (d < 1) throw DimensionMismatch(what + ": non-positive dimension " + std::to_string(d));
      h.dims.push_back(d);
    }
  }
  return h;
}

void check_range(int v, int lo, int hi, const char* field, std::size_t rec) {
  if (v < lo || v > hi) {
    throw DimensionMismatch("norb record " + std::to_string(rec) + ": " + field + " " +
                            std::to_string(v) + " outside [" + std::to_string(lo) + "," +
                            std::to_string(hi) + "]");
  }
}

void write_header(detail::ByteWriter& w, std::int32_t magic, const std::vector<std::int32_t>& dims) {
  w.i32(magic);
  w.i32(static_cast<std::int32_t>(dims.size()));
  for (std::size_t i = 0; i < std::max<std::size_t>(3, dims.size()); ++i) {
    w.i32(i < dims.size() ? dims[i] : 1);
  }
}

}  // namespace

std::vector<NorbRecord> decode_norb(std::span<const std::uint8_t> dat,
                                    std::span<const std::uint8_t> cat,
                                    std::span<const std::uint8_t> info, int downsample) {
  detail::ByteReader rd(dat, "norb dat");
  detail::ByteReader rc(cat, "norb cat");
  detail::ByteReader ri(info, "norb info");
  const auto hd = read_header(rd, kNorbByteMagic, "norb dat");
  const auto hc = read_header(rc, kNorbIntMagic, "norb cat");
  const auto hi = read_header(ri, kNorbIntMagic, "norb info");

  if (hd.dims.size() != 4 || hd.dims[1] != 2 || hd.dims[2] != hd.dims[3]) {
    throw DimensionMismatch("norb dat: expected N x 2 x S x S");
  }
  const auto n = static_cast<std::size_t>(hd.dims[0]);
  if (hc.dims[0] != hd.dims[0] || hc.count() != n) {
    throw DimensionMismatch("norb cat: record count differs from dat");
  }
  if (hi.dims.size() != 2 || hi.dims[0] != hd.dims[0] || hi.dims[1] != 4) {
    throw DimensionMismatch("norb info: expected N x 4");
  }
  const int side = static_cast<int>(hd.dims[2]);
  const std::size_t plane = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  if (rd.remaining() < n * 2 * plane) throw TruncatedFile("norb dat: payload shorter than header says");
  if (rc.remaining() < n * 4) throw TruncatedFile("norb cat: payload shorter than header says");
  if (ri.remaining() < n * 16) throw TruncatedFile("norb info: payload shorter than header says");
  if (downsample < 1 || side % downsample != 0) {
    throw NonDivisible("norb: image side " + std::to_string(side) + " not divisible by " +
                       std::to_string(downsample));
  }

  std::vector<NorbRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    NorbRecord& rec = records[i];
    auto left = rd.take(plane);
    rd.take(plane);  // right eye
    Image img(side, side, 1);
    std::copy(left.begin(), left.end(), img.pixels.begin());
    rec.image = downsample == 1 ? std::move(img) : downsample_box(img, downsample);
    rec.category = rc.i32();
    rec.instance = ri.i32();
    rec.elevation = ri.i32();
    const int az = ri.i32();
    rec.lighting = ri.i32();
    check_range(rec.category, 0, 4, "category", i);
    check_range(rec.instance, 0, 9, "instance", i);
    check_range(rec.elevation, 0, kElevations - 1, "elevation", i);
    check_range(az, 0, 2 * (kAzimuths - 1), "azimuth", i);
    if (az % 2 != 0) throw DimensionMismatch("norb record " + std::to_string(i) + ": odd azimuth " + std::to_string(az));
    rec.azimuth = az / 2;
    check_range(rec.lighting, 0, kLightings - 1, "lighting", i);
  }
  return records;
}

std::vector<NorbRecord> load_norb(const std::string& dat_path, const std::string& cat_path,
                                  const std::string& info_path, int downsample) {
  const auto dat = detail::read_file_bytes(dat_path);
  const auto cat = detail::read_file_bytes(cat_path);
  const auto info = detail::read_file_bytes(info_path);
  return decode_norb(dat, cat, info, downsample);
}

NorbFiles encode_norb(const std::vector<NorbRecord>& records) {
  const int side = records.empty() ? 96 : records.front().image.width;
  const auto n = static_cast<std::int32_t>(records.size());
  detail::ByteWriter wd, wc, wi;
  write_header(wd, kNorbByteMagic, {n, 2, side, side});
  write_header(wc, kNorbIntMagic, {n});
  write_header(wi, kNorbIntMagic, {n, 4});
  for (const auto& r : records) {
    if (r.image.width != side || r.image.height != side || r.image.channels != 1) {
      throw DimensionMismatch("encode_norb: all images must be " + std::to_string(side) + "x" +
                              std::to_string(side) + " grayscale");
    }
    wd.bytes(r.image.pixels.data(), r.image.pixels.size());
    wd.bytes(r.image.pixels.data(), r.image.pixels.size());
    wc.i32(r.category);
    wi.i32(r.instance);
    wi.i32(r.elevation);
    wi.i32(2 * r.azimuth);
    wi.i32(r.lighting);
  }
  return {wd.data(), wc.data(), wi.data()};
}

}  // namespace sst
