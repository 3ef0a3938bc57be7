// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Dense double-precision inner loops used by the network. Every kernel has a
// scalar reference implementation and, where the target allows, an AVX2+FMA
// (x86-64) or NEON (aarch64) variant. The variant is chosen once at startup
// from the CPU feature flags and can be overridden with set_isa().
//
// All matrices are row-major and densely packed.

#include <cstddef>
#include <span>
#include <string_view>

namespace sst::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;
/// Parses "scalar", "avx2", "neon". Throws UsageError otherwise.
Isa parse_isa(std::string_view name);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y *= alpha
  void (*scale)(double alpha, double* y, std::size_t n);
  /// sum of (a - b)^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  /// y = tanh(x); vector variants agree with std::tanh to a few ulp
  void (*tanh_forward)(const double* x, double* y, std::size_t n);
  /// g *= (1 - y^2), the tanh derivative expressed through the output y
  void (*tanh_backward)(const double* y, double* g, std::size_t n);
  /// C(MxN) += A(MxK) * B(KxN)
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
  /// C(MxN) += A(MxK) * B(NxK)^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
  /// C(MxN) += A(KxM)^T * B(KxN)
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
};

/// Whether the variant is compiled in and supported by the running CPU.
bool available(Isa isa) noexcept;
/// Best available variant on this machine.
Isa best_isa() noexcept;
/// Currently selected variant.
Isa active_isa() noexcept;
/// Selects a variant. Throws UsageError if it is not available.
void set_isa(Isa isa);

/// Table for a specific variant (must be available).
const KernelTable& table(Isa isa);
/// Table for the active variant.
const KernelTable& kernels() noexcept;

// Convenience wrappers over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return kernels().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> y) noexcept {
  kernels().scale(alpha, y.data(), y.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  return kernels().squared_distance(a.data(), b.data(), a.size());
}

namespace scalar {
extern const KernelTable kTable;
}
#if defined(SST_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif
#if defined(SST_HAVE_NEON)
namespace neon {
extern const KernelTable kTable;
}
#endif

}  // namespace sst::simd
