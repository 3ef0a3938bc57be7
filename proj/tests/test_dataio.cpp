// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>

#include "sst/benchmark.hpp"
#include "sst/errors.hpp"
#include "sst/image.hpp"
#include "sst/manifest.hpp"
#include "sst/norb.hpp"
#include "sst/rng.hpp"
#include "sst/toy.hpp"

using namespace sst;

namespace {

void put_i32(std::vector<std::uint8_t>& b, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

// Hand-rolled small-NORB files: int32 magic, int32 ndim, max(3, ndim) int32
// dims, little-endian payload.
struct RawNorb {
  std::vector<std::uint8_t> dat, cat, info;
};

RawNorb raw_norb(int n, int side, Rng& rng, std::vector<std::array<int, 5>>& meta,
                 std::vector<std::vector<std::uint8_t>>& left) {
  RawNorb f;
  put_i32(f.dat, 0x1E3D4C55);
  put_i32(f.dat, 4);
  for (int d : {n, 2, side, side}) put_i32(f.dat, d);
  put_i32(f.cat, 0x1E3D4C54);
  put_i32(f.cat, 1);
  for (int d : {n, 1, 1}) put_i32(f.cat, d);
  put_i32(f.info, 0x1E3D4C54);
  put_i32(f.info, 2);
  for (int d : {n, 4, 1}) put_i32(f.info, d);
  for (int i = 0; i < n; ++i) {
    std::array<int, 5> m{static_cast<int>(rng.below(5)), static_cast<int>(rng.below(10)), static_cast<int>(rng.below(9)),
                         static_cast<int>(rng.below(18)) * 2, static_cast<int>(rng.below(6))};
    meta.push_back(m);
    std::vector<std::uint8_t> l(static_cast<std::size_t>(side * side));
    for (auto& p : l) p = static_cast<std::uint8_t>(rng.below(256));
    left.push_back(l);
    f.dat.insert(f.dat.end(), l.begin(), l.end());
    for (int k = 0; k < side * side; ++k) f.dat.push_back(static_cast<std::uint8_t>(255 - l[static_cast<std::size_t>(k)]));
    put_i32(f.cat, m[0]);
    for (int k = 1; k < 5; ++k) put_i32(f.info, m[static_cast<std::size_t>(k)]);
  }
  return f;
}

Image random_image(Rng& rng, int w, int h, int c = 1) {
  Image img(w, h, c);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

}  // namespace

TEST_CASE("decode_norb reads hand-written files") {
  Rng rng(1);
  std::vector<std::array<int, 5>> meta;
  std::vector<std::vector<std::uint8_t>> left;
  const auto f = raw_norb(7, 6, rng, meta, left);
  const auto recs = decode_norb(f.dat, f.cat, f.info);
  REQUIRE(recs.size() == 7);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].category == meta[i][0]);
    CHECK(recs[i].instance == meta[i][1]);
    CHECK(recs[i].elevation == meta[i][2]);
    CHECK(recs[i].azimuth == meta[i][3] / 2);
    CHECK(recs[i].lighting == meta[i][4]);
    CHECK(recs[i].image.width == 6);
    CHECK(recs[i].image.pixels == left[i]);  // left eye only
  }
  // Downsampled on load.
  const auto small = decode_norb(f.dat, f.cat, f.info, 3);
  CHECK(small[0].image.width == 2);
  Image full(6, 6);
  full.pixels = left[0];
  CHECK(small[0].image == downsample_box(full, 3));
}

TEST_CASE("encode_norb round trips bit exactly") {
  Rng rng(2);
  std::vector<NorbRecord> recs;
  for (int i = 0; i < 5; ++i) {
    recs.push_back({random_image(rng, 96, 96), i % 5, (i * 3) % 10, i % 9, (i * 7) % 18, i % 6});
  }
  const auto files = encode_norb(recs);
  CHECK(decode_norb(files.dat, files.cat, files.info) == recs);
  const auto again = encode_norb(decode_norb(files.dat, files.cat, files.info));
  CHECK(again.dat == files.dat);
  CHECK(again.cat == files.cat);
  CHECK(again.info == files.info);
}

TEST_CASE("decode_norb errors") {
  Rng rng(3);
  std::vector<std::array<int, 5>> meta;
  std::vector<std::vector<std::uint8_t>> left;
  const auto f = raw_norb(3, 6, rng, meta, left);

  auto bad = f.dat;
  bad[0] ^= 1;
  CHECK_THROWS_AS(decode_norb(bad, f.cat, f.info), BadMagic);
  CHECK_THROWS_AS(decode_norb(f.cat, f.cat, f.info), BadMagic);
  for (std::size_t cut : {std::size_t{3}, std::size_t{12}, f.dat.size() - 1}) {
    CHECK_THROWS_AS(decode_norb(std::span(f.dat).first(cut), f.cat, f.info), TruncatedFile);
  }
  CHECK_THROWS_AS(decode_norb(f.dat, std::span(f.cat).first(f.cat.size() - 2), f.info), TruncatedFile);
  CHECK_THROWS_AS(decode_norb(f.dat, f.cat, std::span(f.info).first(f.info.size() - 4)), TruncatedFile);

  // Count mismatch between files.
  std::vector<std::array<int, 5>> m2;
  std::vector<std::vector<std::uint8_t>> l2;
  const auto g = raw_norb(4, 6, rng, m2, l2);
  CHECK_THROWS_AS(decode_norb(f.dat, g.cat, f.info), DimensionMismatch);

  // Out-of-range category.
  auto cat = f.cat;
  cat[cat.size() - 4] = 9;
  CHECK_THROWS_AS(decode_norb(f.dat, cat, f.info), DimensionMismatch);
  CHECK_THROWS_AS(decode_norb(f.dat, f.cat, f.info, 4), NonDivisible);
}

TEST_CASE("decode_norb is total on random byte streams") {
  Rng rng(4);
  std::vector<std::array<int, 5>> meta;
  std::vector<std::vector<std::uint8_t>> left;
  const auto f = raw_norb(2, 6, rng, meta, left);
  for (int trial = 0; trial < 500; ++trial) {
    auto dat = f.dat, cat = f.cat, info = f.info;
    auto& victim = trial % 3 == 0 ? dat : trial % 3 == 1 ? cat : info;
    const int flips = 1 + static_cast<int>(rng.below(4));
    for (int k = 0; k < flips; ++k) victim[rng.below(victim.size())] = static_cast<std::uint8_t>(rng.below(256));
    if (rng.bernoulli(0.3)) victim.resize(rng.below(victim.size() + 1));
    try {
      decode_norb(dat, cat, info);
    } catch (const Error&) {
    }
  }
  CHECK(true);
}

TEST_CASE("downsample_box") {
  Image c(96, 96, 1, 100);
  const auto d = downsample_box(c, 3);
  CHECK(d.width == 32);
  for (auto p : d.pixels) CHECK(p == 100);

  Image two(2, 2);
  two.pixels = {0, 255, 255, 0};
  CHECK(downsample_box(two, 2).pixels == std::vector<std::uint8_t>{128});

  CHECK_THROWS_AS(downsample_box(Image(10, 10), 3), NonDivisible);

  Rng rng(5);
  for (int f : {3, 4}) {
    const int side = 32 * f;
    const auto img = random_image(rng, side, side);
    const auto out = downsample_box(img, f);
    double mean_in = 0.0, mean_out = 0.0;
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) {
        int s = 0;
        for (int a = 0; a < f; ++a)
          for (int b = 0; b < f; ++b) s += img.at(x * f + b, y * f + a);
        // round half up of s / f^2, in integers
        const int expect = (2 * s + f * f) / (2 * f * f);
        CHECK(out.at(x, y) == expect);
      }
    for (auto p : img.pixels) mean_in += p;
    for (auto p : out.pixels) mean_out += p;
    CHECK(std::abs(mean_in / img.pixels.size() - mean_out / out.pixels.size()) <= 0.5);
  }
}

TEST_CASE("rgb_to_gray") {
  Image px(1, 1, 3);
  px.pixels = {255, 255, 255};
  CHECK(rgb_to_gray(px).pixels[0] == 255);
  px.pixels = {255, 0, 0};
  CHECK(rgb_to_gray(px).pixels[0] == 76);
  for (int v = 0; v < 256; ++v) {
    px.pixels = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v)};
    CHECK(rgb_to_gray(px).pixels[0] == v);
  }
  CHECK_THROWS_AS(rgb_to_gray(Image(2, 2, 1)), DimensionMismatch);
}

TEST_CASE("pnm round trip and errors") {
  Rng rng(6);
  for (int c : {1, 3}) {
    const auto img = random_image(rng, 7, 5, c);
    const auto bytes = encode_pnm(img);
    CHECK(decode_pnm(bytes) == img);
  }
  const std::string hand = "P5\n# comment\n2 2\n255\n";
  std::vector<std::uint8_t> b(hand.begin(), hand.end());
  for (std::uint8_t v : {1, 2, 3, 4}) b.push_back(v);
  CHECK(decode_pnm(b).pixels == std::vector<std::uint8_t>{1, 2, 3, 4});
  b.pop_back();
  CHECK_THROWS_AS(decode_pnm(b), TruncatedFile);
  const std::string p2 = "P2\n1 1\n255\n0\n";
  CHECK_THROWS_AS(decode_pnm(std::vector<std::uint8_t>(p2.begin(), p2.end())), BadMagic);

  const auto dir = std::filesystem::temp_directory_path() / "sst_test_pnm";
  std::filesystem::create_directories(dir);
  const auto img = random_image(rng, 4, 4, 3);
  write_pnm(img, (dir / "a.ppm").string());
  CHECK(read_pnm((dir / "a.ppm").string()) == img);
}

TEST_CASE("to_unit_range") {
  Image img(2, 1);
  img.pixels = {0, 255};
  CHECK(to_unit_range(img) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("toy renderer") {
  const ToyDatasetSpec spec;
  const auto a = render_toy(spec, 12, {3, 4, 2});
  CHECK(a.width == 32);
  CHECK(a.height == 32);
  CHECK(a == render_toy(spec, 12, {3, 4, 2}));
  CHECK(render_toy(spec, 12, {3, 4, 2}) == render_toy(spec, 12, {3, 4 + 18, 2}));
  CHECK(render_toy(spec, 12, {3, 4, 2}) != render_toy(spec, 12, {3, 5, 2}));
  CHECK(render_toy(spec, 12, {3, 4, 2}) != render_toy(spec, 13, {3, 4, 2}));
  CHECK_THROWS_AS(render_toy(spec, 50, {0, 0, 0}), IndexOutOfRange);
  CHECK_THROWS_AS(render_toy(spec, 0, {9, 0, 0}), IndexOutOfRange);

  std::set<std::vector<std::uint8_t>> distinct;
  int count = 0;
  for (int i = 0; i < kGridSize; ++i) {
    distinct.insert(render_toy(spec, 7, VariationPoint::from_index(i)).pixels);
    ++count;
  }
  CHECK(count == kGridSize);
  CHECK(distinct.size() > kGridSize / 2);

  for (int obj = 0; obj < spec.n_objects(); ++obj) CHECK(static_cast<int>(toy_shape(spec, obj)) == obj / 10);
  ToyDatasetSpec other = spec;
  other.seed += 1;
  CHECK(render_toy(other, 12, {3, 4, 2}) != a);
}

TEST_CASE("frame ids") {
  CHECK(format_frame_id(12, {3, 17, 5}) == "object12_e3_a17_l5");
  const auto id = parse_frame_id("object12_e3_a17_l5");
  CHECK(id.object_id == 12);
  CHECK(id.point == VariationPoint{3, 17, 5});
  CHECK_THROWS_AS(parse_frame_id("object12_e9_a0_l0"), ParseError);
  CHECK_THROWS_AS(parse_frame_id("object12_e1_a0"), ParseError);
  CHECK_THROWS_AS(parse_frame_id("object-1_e1_a0_l0"), ParseError);
}

TEST_CASE("manifest round trips") {
  CHECK(write_manifest({}).empty());
  CHECK(read_manifest("").empty());

  BenchmarkConfig cfg;
  const auto layout = make_layout(cfg);
  for (const auto& batches : {layout.train, layout.test}) {
    for (const auto& b : batches) CHECK(read_manifest(write_manifest(b.sequences)) == b.sequences);
  }
  const std::string crlf = "object1_e0_a0_l0\r\nobject1_e0_a1_l0\r\n\r\n\r\nobject2_e4_a4_l4\r\n";
  const auto seqs = read_manifest(crlf);
  REQUIRE(seqs.size() == 2);
  CHECK(seqs[0].points.size() == 2);
  CHECK(seqs[1].object_id == 2);
}

TEST_CASE("manifest parse errors name the line") {
  const auto line_of = [](const std::string& text) -> std::size_t {
    try {
      read_manifest(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("object1_e0_a0_l0\nbogus\n") == 2);
  CHECK(line_of("object1_e0_a0_l0\nobject1_e0_a0_l2\n") == 2);  // not adjacent
  CHECK(line_of("object1_e0_a0_l0\nobject2_e0_a0_l1\n") == 2);  // object change
  CHECK(line_of("\n\nobject1_e0_a0_l0\nobject1_e0_a17_l0\n\nobject1_e20_a0_l0\n") == 6);
  CHECK_THROWS_AS(write_manifest({FrameSequence{1, {}}}), UsageError);
}

TEST_CASE("coil manifests") {
  const std::vector<CoilSequence> seqs{{0, {0, 1, 2}}, {99, {71, 70}}};
  CHECK(read_coil_manifest(write_coil_manifest(seqs)) == seqs);
  CHECK_THROWS_AS(read_coil_manifest("object1_p72\n"), ParseError);
}
