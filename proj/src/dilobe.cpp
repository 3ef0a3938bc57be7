// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/dilobe.hpp"

#include <cmath>
#include <numbers>

#include "sst/errors.hpp"
#include "sst/rng.hpp"

namespace sst {
namespace {

struct Lobe {
  double cx, cy, sx, sy, theta;

  double operator()(double x, double y) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double u = c * (x - cx) + s * (y - cy);
    const double v = -s * (x - cx) + c * (y - cy);
    return std::exp(-0.5 * (u * u / (sx * sx) + v * v / (sy * sy)));
  }
};

Lobe random_lobe(Rng& rng, int size) {
  const double hi = size - 1.0;
  return {rng.uniform(0.0, hi), rng.uniform(0.0, hi), rng.uniform(0.1, 0.3) * size,
          rng.uniform(0.1, 0.3) * size, rng.uniform(0.0, std::numbers::pi)};
}

}  // namespace

std::vector<Tensor> dilobe_filter_bank(int n, int size, std::uint64_t seed) {
  if (n < 1) throw UsageError("dilobe_filter_bank: n must be >= 1");
  if (size < 2) throw UsageError("dilobe_filter_bank: size must be >= 2");
  Rng rng(seed);
  std::vector<Tensor> bank;
  bank.reserve(static_cast<std::size_t>(n));
  const std::size_t side = static_cast<std::size_t>(size);
  for (int f = 0; f < n; ++f) {
    const Lobe pos = random_lobe(rng, size);
    Lobe neg = random_lobe(rng, size);
    // Keep the lobes apart so the filter compares two regions.
    while (std::hypot(neg.cx - pos.cx, neg.cy - pos.cy) < 0.25 * size) neg = random_lobe(rng, size);

    Tensor t({side, side});
    double mean = 0.0;
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        const double v = pos(static_cast<double>(x), static_cast<double>(y)) -
                         neg(static_cast<double>(x), static_cast<double>(y));
        t(y, x) = v;
        mean += v;
      }
    }
    mean /= static_cast<double>(t.size());
    double norm = 0.0;
    for (double& v : t.data) {
      v -= mean;
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& v : t.data) v /= norm;
    }
    // Re-centre after scaling so the coefficient sum is zero to rounding.
    double residual = 0.0;
    for (double v : t.data) residual += v;
    residual /= static_cast<double>(t.size());
    for (double& v : t.data) v -= residual;
    bank.push_back(std::move(t));
  }
  return bank;
}

}  // namespace sst
