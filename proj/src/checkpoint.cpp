// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/checkpoint.hpp"

#include <cstring>

#include "binio.hpp"

namespace sst {
namespace {

constexpr char kMagic[8] = {'S', 'S', 'T', 'N', 'E', 'T', '0', '1'};
constexpr std::uint32_t kVersion = 1;

void read_doubles(detail::ByteReader& r, std::vector<double>& dst, const char* what,
                  std::size_t layer) {
  const std::uint64_t n = r.u64();
  if (n != dst.size()) {
    throw DimensionMismatch("checkpoint layer " + std::to_string(layer) + ": " + what + " count " +
                            std::to_string(n) + ", architecture needs " + std::to_string(dst.size()));
  }
  for (double& v : dst) v = r.f64();
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Network& net) {
  detail::ByteWriter w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  const Shape3& in = net.input_shape();
  w.u32(static_cast<std::uint32_t>(in.maps));
  w.u32(static_cast<std::uint32_t>(in.height));
  w.u32(static_cast<std::uint32_t>(in.width));
  w.u64(net.seed());
  w.u32(static_cast<std::uint32_t>(net.layers().size()));
  for (const LayerSpec& l : net.layers()) {
    w.u32(static_cast<std::uint32_t>(l.kind));
    w.u32(static_cast<std::uint32_t>(l.units));
    w.u32(static_cast<std::uint32_t>(l.kernel));
    w.u32(static_cast<std::uint32_t>(l.activation));
    w.u32(l.trainable ? 1u : 0u);
  }
  for (const LayerParams& p : net.params()) {
    w.u64(p.weights.size());
    for (double v : p.weights) w.f64(v);
    w.u64(p.bias.size());
    for (double v : p.bias) w.f64(v);
  }
  return w.data();
}

Network decode_checkpoint(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "checkpoint");
  auto magic = r.take(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) throw BadMagic("not a checkpoint file");
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw BadMagic("unsupported checkpoint version " + std::to_string(version));
  Shape3 in;
  in.maps = static_cast<int>(r.u32());
  in.height = static_cast<int>(r.u32());
  in.width = static_cast<int>(r.u32());
  const std::uint64_t seed = r.u64();
  const std::uint32_t n_layers = r.u32();
  if (n_layers > 4096) throw DimensionMismatch("implausible layer count " + std::to_string(n_layers));
  std::vector<LayerSpec> arch(n_layers);
  for (auto& l : arch) {
    const std::uint32_t kind = r.u32();
    if (kind > 3) throw InconsistentArchitecture("unknown layer kind " + std::to_string(kind));
    l.kind = static_cast<LayerKind>(kind);
    l.units = static_cast<int>(r.u32());
    l.kernel = static_cast<int>(r.u32());
    const std::uint32_t act = r.u32();
    if (act > 1) throw InconsistentArchitecture("unknown activation " + std::to_string(act));
    l.activation = static_cast<Activation>(act);
    l.trainable = r.u32() != 0;
  }
  std::size_t expected = 0;
  for (const auto& [nw, nb] : Network::parameter_counts(arch, in)) expected += 16 + 8 * (nw + nb);
  if (expected > r.remaining()) {
    throw TruncatedFile("checkpoint: architecture needs " + std::to_string(expected) +
                        " payload bytes, " + std::to_string(r.remaining()) + " present");
  }
  Network net(std::move(arch), seed, in);
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    read_doubles(r, net.params()[i].weights, "weight", i);
    read_doubles(r, net.params()[i].bias, "bias", i);
  }
  if (r.remaining() != 0) throw DimensionMismatch("trailing bytes after checkpoint payload");
  return net;
}

void save_checkpoint(const Network& net, const std::string& path) {
  detail::write_file_bytes(path, encode_checkpoint(net));
}

Network load_checkpoint(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  return decode_checkpoint(bytes);
}

}  // namespace sst
