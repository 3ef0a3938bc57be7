// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sst/tensor.hpp"

namespace sst {

/// Random dilobe ordinal filters: each is a positive and a negative
/// anisotropic 2-D Gaussian with random centre, spread and orientation,
/// shifted to zero mean and scaled to unit L2 norm. Meant as a fixed
/// (trainable = false) first conv layer; see Network::set_filters.
std::vector<Tensor> dilobe_filter_bank(int n = 50, int size = 8, std::uint64_t seed = 0);

}  // namespace sst
