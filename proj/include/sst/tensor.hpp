// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "sst/errors.hpp"

namespace sst {

/// Dense row-major array of doubles.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> s, double fill = 0.0) : shape(std::move(s)) {
    data.assign(element_count(shape), fill);
  }

  Tensor(std::vector<std::size_t> s, std::vector<double> values)
      : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != element_count(shape)) {
      throw ShapeMismatch("tensor data has " + std::to_string(data.size()) +
                          " elements, shape requires " + std::to_string(element_count(shape)));
    }
  }

  std::size_t size() const noexcept { return data.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data[r * shape.back() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * shape.back() + c]; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

  static std::size_t element_count(const std::vector<std::size_t>& s) {
    for (std::size_t d : s) {
      if (d == 0) throw ShapeMismatch("tensor dimensions must be positive");
    }
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }
};

}  // namespace sst
