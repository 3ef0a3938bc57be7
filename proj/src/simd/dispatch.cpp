// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

// Variant selection only; no intrinsics here.

#include <atomic>
#include <string>

#include "sst/errors.hpp"
#include "sst/simd.hpp"

namespace sst::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(SST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{&table(best_isa())};
  return slot;
}

std::atomic<Isa>& active_isa_slot() noexcept {
  static std::atomic<Isa> slot{best_isa()};
  return slot;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  throw UsageError("unknown isa '" + std::string(name) + "' (expected scalar, avx2 or neon)");
}

bool available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: {
      static const bool ok = cpu_has_avx2();
      return ok;
    }
    case Isa::neon:
#if defined(SST_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept {
  if (available(Isa::avx2)) return Isa::avx2;
  if (available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const KernelTable& table(Isa isa) {
  switch (isa) {
#if defined(SST_HAVE_AVX2)
    case Isa::avx2:
      if (available(Isa::avx2)) return avx2::kTable;
      break;
#endif
#if defined(SST_HAVE_NEON)
    case Isa::neon: return neon::kTable;
#endif
    case Isa::scalar: return scalar::kTable;
    default: break;
  }
  throw UsageError("isa '" + std::string(to_string(isa)) + "' is not available on this machine");
}

Isa active_isa() noexcept { return active_isa_slot().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  const KernelTable& t = table(isa);
  active_slot().store(&t, std::memory_order_relaxed);
  active_isa_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels() noexcept { return *active_slot().load(std::memory_order_relaxed); }

}  // namespace sst::simd
