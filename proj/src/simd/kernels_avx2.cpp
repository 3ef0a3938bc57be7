// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the dispatcher has checked the CPU flags.

#include <immintrin.h>

#include <cmath>
#include <iterator>

#include "sst/simd.hpp"

namespace sst::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double dot_inline(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline void axpy_inline(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  if (i + 4 <= n) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    i += 4;
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot(const double* a, const double* b, std::size_t n) { return dot_inline(a, b, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) { axpy_inline(alpha, x, y, n); }

void scale(double alpha, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] *= alpha;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// expm1 for |x| <= 40: x = n ln2 + r with |r| <= ln2/2, expm1(r) by its
// Taylor series to degree 13, then expm1(x) = 2^n expm1(r) + (2^n - 1).
inline __m256d expm1_pd(__m256d x) {
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);
  static constexpr double kInvFact[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                                        1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                                        1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                                        1.0 / 24.0,         1.0 / 6.0,         0.5,
                                        1.0};
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (std::size_t i = 1; i < std::size(kInvFact); ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[i]));
  p = _mm256_mul_pd(p, r);  // expm1(r)
  // 2^n from the exponent field; n + 1.5 * 2^52 holds n in its low bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i bits = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)), _mm256_castpd_si256(magic));
  const __m256d two_n =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52));
  return _mm256_add_pd(_mm256_mul_pd(two_n, p), _mm256_sub_pd(two_n, _mm256_set1_pd(1.0)));
}

// tanh(x) = sign(x) * e / (e + 2) with e = expm1(2|x|); |x| is capped at 20,
// where tanh already rounds to 1.
void tanh_forward(const double* x, double* y, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d cap = _mm256_set1_pd(20.0);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d sign = _mm256_and_pd(v, sign_mask);
    const __m256d a = _mm256_min_pd(_mm256_andnot_pd(sign_mask, v), cap);
    const __m256d e = expm1_pd(_mm256_add_pd(a, a));
    const __m256d t = _mm256_div_pd(e, _mm256_add_pd(e, two));
    _mm256_storeu_pd(y + i, _mm256_or_pd(t, sign));
  }
  for (; i < n; ++i) y[i] = std::tanh(x[i]);
}

void tanh_backward(const double* y, double* g, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d d = _mm256_fnmadd_pd(vy, vy, one);
    _mm256_storeu_pd(g + i, _mm256_mul_pd(_mm256_loadu_pd(g + i), d));
  }
  for (; i < n; ++i) g[i] *= 1.0 - y[i] * y[i];
}

// Register-blocked C(MRx8) += A(MRxK) B(Kx8) where A(r, p) = a[r * rs + p * cs].
template <int MR>
inline void block8(std::size_t n, std::size_t k, const double* a, std::size_t rs, std::size_t cs,
                   const double* b, double* c) {
  __m256d acc[MR][2];
  for (int r = 0; r < MR; ++r) {
    acc[r][0] = _mm256_loadu_pd(c + r * n);
    acc[r][1] = _mm256_loadu_pd(c + r * n + 4);
  }
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * n);
    const __m256d b1 = _mm256_loadu_pd(b + p * n + 4);
    for (int r = 0; r < MR; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * rs + p * cs);
      acc[r][0] = _mm256_fmadd_pd(av, b0, acc[r][0]);
      acc[r][1] = _mm256_fmadd_pd(av, b1, acc[r][1]);
    }
  }
  for (int r = 0; r < MR; ++r) {
    _mm256_storeu_pd(c + r * n, acc[r][0]);
    _mm256_storeu_pd(c + r * n + 4, acc[r][1]);
  }
}

template <int MR>
inline void block4(std::size_t n, std::size_t k, const double* a, std::size_t rs, std::size_t cs,
                   const double* b, double* c) {
  __m256d acc[MR];
  for (int r = 0; r < MR; ++r) acc[r] = _mm256_loadu_pd(c + r * n);
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * n);
    for (int r = 0; r < MR; ++r) acc[r] = _mm256_fmadd_pd(_mm256_broadcast_sd(a + r * rs + p * cs), b0, acc[r]);
  }
  for (int r = 0; r < MR; ++r) _mm256_storeu_pd(c + r * n, acc[r]);
}

template <int MR>
void row_panel(std::size_t n, std::size_t k, const double* a, std::size_t rs, std::size_t cs,
               const double* b, double* c) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) block8<MR>(n, k, a, rs, cs, b + j, c + j);
  if (j + 4 <= n) {
    block4<MR>(n, k, a, rs, cs, b + j, c + j);
    j += 4;
  }
  for (; j < n; ++j) {
    for (int r = 0; r < MR; ++r) {
      double s = c[r * n + j];
      for (std::size_t p = 0; p < k; ++p) s += a[r * rs + p * cs] * b[p * n + j];
      c[r * n + j] = s;
    }
  }
}

void gemm_strided(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t rs,
                  std::size_t cs, const double* b, double* c) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) row_panel<4>(n, k, a + i * rs, rs, cs, b, c + i * n);
  switch (m - i) {
    case 3: row_panel<3>(n, k, a + i * rs, rs, cs, b, c + i * n); break;
    case 2: row_panel<2>(n, k, a + i * rs, rs, cs, b, c + i * n); break;
    case 1: row_panel<1>(n, k, a + i * rs, rs, cs, b, c + i * n); break;
    default: break;
  }
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c) {
  gemm_strided(m, n, k, a, k, 1, b, c);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c) {
  gemm_strided(m, n, k, a, 1, m, b, c);
}

// Dot products of RA rows of A with RB rows of B, all of length k.
template <int RA, int RB>
inline void dot_block(std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  __m256d acc[RA][RB];
  for (int r = 0; r < RA; ++r)
    for (int s = 0; s < RB; ++s) acc[r][s] = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= k; p += 4) {
    __m256d bv[RB];
    for (int s = 0; s < RB; ++s) bv[s] = _mm256_loadu_pd(b + s * k + p);
    for (int r = 0; r < RA; ++r) {
      const __m256d av = _mm256_loadu_pd(a + r * k + p);
      for (int s = 0; s < RB; ++s) acc[r][s] = _mm256_fmadd_pd(av, bv[s], acc[r][s]);
    }
  }
  for (int r = 0; r < RA; ++r) {
    for (int s = 0; s < RB; ++s) {
      double v = hsum(acc[r][s]);
      for (std::size_t q = p; q < k; ++q) v += a[r * k + q] * b[s * k + q];
      c[r * n + s] += v;
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) dot_block<4, 2>(n, k, a + i * k, b + j * k, c + i * n + j);
    if (j < n) dot_block<4, 1>(n, k, a + i * k, b + j * k, c + i * n + j);
  }
  for (; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += dot_inline(a + i * k, b + j * k, k);
  }
}

}  // namespace

const KernelTable kTable{dot, axpy, scale, squared_distance, tanh_forward,
                         tanh_backward, gemm_nn, gemm_nt, gemm_tn};

}  // namespace sst::simd::avx2
