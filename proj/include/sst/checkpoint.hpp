// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Network checkpoint file, little-endian throughout:
//
//   "SSTNET01"                          8-byte magic
//   u32 version (1)
//   u32 input maps, u32 input height, u32 input width
//   u64 init seed
//   u32 layer count L
//   L x { u32 kind, u32 units, u32 kernel, u32 activation, u32 trainable }
//   L x { u64 n_weights, f64[n_weights], u64 n_bias, f64[n_bias] }
//
// Parameters are stored as raw IEEE-754 bits so a round trip is bit-exact.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sst/network.hpp"

namespace sst {

std::vector<std::uint8_t> encode_checkpoint(const Network& net);
/// Throws BadMagic, TruncatedFile, DimensionMismatch, InconsistentArchitecture.
Network decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace sst
