// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/toy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sst/errors.hpp"
#include "sst/rng.hpp"

namespace sst {
namespace {

constexpr int kSuper = 3;  // supersampling per axis

struct ObjectParams {
  ToyShape shape;
  double radius;     // pixels
  double aspect;     // minor/major
  double thickness;  // cross arm half-width or ring width, unit-radius coordinates
  double albedo;
  double phase;      // base rotation, radians
  double ox, oy;     // centre offset, pixels
  double stripe_amp, stripe_freq, stripe_phase;
};

ObjectParams object_params(const ToyDatasetSpec& spec, int object_id) {
  Rng r(derive_seed(spec.seed, {tag("toy-object"), static_cast<std::uint64_t>(object_id)}));
  ObjectParams p{};
  p.shape = toy_shape(spec, object_id);
  const double scale = spec.size / 32.0;
  p.radius = r.uniform(7.0, 11.5) * scale;
  p.aspect = r.uniform(0.45, 0.95);
  p.thickness = r.uniform(0.22, 0.42);
  p.albedo = r.uniform(0.55, 0.95);
  p.phase = r.uniform(0.0, 2.0 * std::numbers::pi);
  p.ox = r.uniform(-1.5, 1.5) * scale;
  p.oy = r.uniform(-1.5, 1.5) * scale;
  p.stripe_amp = r.uniform(0.0, 0.35);
  p.stripe_freq = r.uniform(2.0, 6.0);
  p.stripe_phase = r.uniform(0.0, 2.0 * std::numbers::pi);
  return p;
}

// Inside test in object coordinates (unit major radius).
bool inside(const ObjectParams& p, double u, double v) {
  switch (p.shape) {
    case ToyShape::ellipse: {
      const double vv = v / p.aspect;
      return u * u + vv * vv <= 1.0;
    }
    case ToyShape::rectangle:
      return std::abs(u) <= 0.9 && std::abs(v) <= 0.9 * p.aspect;
    case ToyShape::cross:
      return (std::abs(u) <= 1.0 && std::abs(v) <= p.thickness) ||
             (std::abs(v) <= 1.0 * std::max(p.aspect, 0.6) && std::abs(u) <= p.thickness);
    case ToyShape::annulus: {
      const double vv = v / std::max(p.aspect, 0.6);
      const double rho = std::sqrt(u * u + vv * vv);
      return rho <= 1.0 && rho >= 1.0 - p.thickness;
    }
    case ToyShape::triangle: {
      // Isosceles triangle pointing along +v, base width set by aspect.
      const double h = 1.0;
      const double half_base = 0.5 + 0.5 * p.aspect;
      const double t = (v + 0.5 * h) / (1.5 * h);  // 0 at the base, 1 at the apex
      return t >= 0.0 && t <= 1.0 && std::abs(u) <= half_base * (1.0 - t);
    }
  }
  return false;
}

// Deterministic per-pixel noise in [-1, 1].
double pixel_noise(std::uint64_t seed, int object_id, int pose, int x, int y) {
  const std::uint64_t h = derive_seed(seed, {tag("toy-noise"), static_cast<std::uint64_t>(object_id),
                                             static_cast<std::uint64_t>(pose),
                                             static_cast<std::uint64_t>(y * 4096 + x)});
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

void ToyDatasetSpec::validate() const {
  if (n_classes < 1 || n_classes > 5) throw UsageError("toy n_classes must be in [1,5]");
  if (objects_per_class < 1) throw UsageError("toy objects_per_class must be >= 1");
  if (size < 8) throw UsageError("toy size must be >= 8");
  if (!(noise >= 0.0 && noise <= 1.0)) throw UsageError("toy noise must be in [0,1]");
}

ToyShape toy_shape(const ToyDatasetSpec& spec, int object_id) {
  if (object_id < 0 || object_id >= spec.n_objects()) {
    throw IndexOutOfRange("toy object " + std::to_string(object_id) + " outside [0, " +
                          std::to_string(spec.n_objects()) + ")");
  }
  return static_cast<ToyShape>(object_id / spec.objects_per_class);
}

Image render_toy(const ToyDatasetSpec& spec, int object_id, const VariationPoint& point) {
  spec.validate();
  const ObjectParams p = object_params(spec, object_id);
  VariationPoint q = point;
  q.azimuth = ((q.azimuth % kAzimuths) + kAzimuths) % kAzimuths;
  if (!q.valid()) throw IndexOutOfRange("toy pose outside the variation grid");

  const double scale = spec.size / 32.0;
  const double theta = p.phase + q.azimuth * (2.0 * std::numbers::pi / kAzimuths);
  const double ct = std::cos(theta), st = std::sin(theta);
  // Higher elevation: the object rises and is seen more from above (squashed).
  const double squash = 1.0 - 0.045 * q.elevation;
  const double cx = 0.5 * spec.size + p.ox;
  const double cy = 0.5 * spec.size + p.oy + (q.elevation - 4) * 0.55 * scale;
  const double light = 0.6 + 0.08 * q.lighting;
  const double light_dir = q.lighting * (std::numbers::pi / 3.0);
  const double lx = std::cos(light_dir), ly = std::sin(light_dir);
  const double background = 0.12 + 0.03 * q.lighting;

  Image img(spec.size, spec.size, 1);
  for (int y = 0; y < spec.size; ++y) {
    for (int x = 0; x < spec.size; ++x) {
      double acc = 0.0;
      for (int sy = 0; sy < kSuper; ++sy) {
        for (int sx = 0; sx < kSuper; ++sx) {
          const double px = x + (sx + 0.5) / kSuper;
          const double py = y + (sy + 0.5) / kSuper;
          const double dx = (px - cx) / p.radius;
          const double dy = (py - cy) / (p.radius * squash);
          const double u = ct * dx + st * dy;
          const double v = -st * dx + ct * dy;
          if (inside(p, u, v)) {
            const double shade = 1.0 + 0.35 * (lx * dx + ly * dy);
            const double stripes = 1.0 + p.stripe_amp * std::sin(p.stripe_freq * u + p.stripe_phase);
            acc += p.albedo * light * shade * stripes;
          } else {
            acc += background;
          }
        }
      }
      double value = acc / (kSuper * kSuper) + spec.noise * pixel_noise(spec.seed, object_id, q.index(), x, y);
      value = std::clamp(value, 0.0, 1.0);
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(value * 255.0));
    }
  }
  return img;
}

}  // namespace sst
