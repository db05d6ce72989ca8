// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.

#include "tsplab/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace tsplab::kernels::detail {
namespace {

constexpr std::size_t kLanes = 4;

void distance_row(const double* xs, const double* ys, double x, double y, double* out,
                  std::size_t n) {
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vy = _mm256_set1_pd(y);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(xs + j));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(ys + j));
    // mul + add kept separate so results match the scalar kernel exactly
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + j, _mm256_sqrt_pd(sq));
  }
  for (; j < n; ++j) {
    const double dx = x - xs[j];
    const double dy = y - ys[j];
    out[j] = std::sqrt(dx * dx + dy * dy);
  }
}

// exp(x) = 2^k * e^r with k = round(x / ln 2), |r| <= ln(2)/2; e^r by a
// degree-13 Taylor polynomial (truncation below 1e-17 relative). 2^k is
// applied as two half-scalings so subnormal results come out right.
__m256d exp_pd(__m256d x) {
  const __m256d kMaxArg = _mm256_set1_pd(709.782712893384);
  const __m256d kMinArg = _mm256_set1_pd(-745.1332191019412);
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d kLn2Hi = _mm256_set1_pd(0x1.62e42fefa39efp-1);
  const __m256d kLn2Lo = _mm256_set1_pd(0x1.abc9e3b39803fp-56);

  const __m256d overflow = _mm256_cmp_pd(x, kMaxArg, _CMP_GT_OQ);
  const __m256d underflow = _mm256_cmp_pd(x, kMinArg, _CMP_LT_OQ);
  const __m256d is_nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);

  const __m256d xc = _mm256_max_pd(_mm256_min_pd(x, kMaxArg), kMinArg);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(xc, kLog2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, kLn2Hi, xc);
  r = _mm256_fnmadd_pd(k, kLn2Lo, r);

  // Horner over 1/i!, i = 13 .. 0
  static constexpr double kInvFact[14] = {
      1.0,
      1.0,
      1.0 / 2.0,
      1.0 / 6.0,
      1.0 / 24.0,
      1.0 / 120.0,
      1.0 / 720.0,
      1.0 / 5040.0,
      1.0 / 40320.0,
      1.0 / 362880.0,
      1.0 / 3628800.0,
      1.0 / 39916800.0,
      1.0 / 479001600.0,
      1.0 / 6227020800.0,
  };
  __m256d p = _mm256_set1_pd(kInvFact[13]);
  for (int i = 12; i >= 0; --i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[i]));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  const __m128i k_half = _mm_srai_epi32(k32, 1);
  const __m128i k_rest = _mm_sub_epi32(k32, k_half);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d s1 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k_half), bias), 52));
  const __m256d s2 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k_rest), bias), 52));
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);

  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), underflow);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                            overflow);
  return _mm256_blendv_pd(result, x, is_nan);
}

void exp_shifted_row(const double* d, double shift, double tau, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(shift);
  const __m256d vt = _mm256_set1_pd(tau);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d arg = _mm256_div_pd(_mm256_sub_pd(vs, _mm256_loadu_pd(d + j)), vt);
    _mm256_storeu_pd(out + j, exp_pd(arg));
  }
  if (j < n) {
    alignas(32) double tail[kLanes];
    for (std::size_t t = 0; t < kLanes; ++t) {
      tail[t] = j + t < n ? (shift - d[j + t]) / tau : 0.0;
    }
    _mm256_store_pd(tail, exp_pd(_mm256_load_pd(tail)));
    for (std::size_t t = 0; j + t < n; ++t) out[j + t] = tail[t];
  }
}

double sum(const double* v, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 2 * kLanes <= n; j += 2 * kLanes) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(v + j));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(v + j + kLanes));
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc0);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; j < n; ++j) s += v[j];
  return s;
}

void scale_row(double* v, double divisor, std::size_t n) {
  const __m256d vd = _mm256_set1_pd(divisor);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    _mm256_storeu_pd(v + j, _mm256_div_pd(_mm256_loadu_pd(v + j), vd));
  }
  for (; j < n; ++j) v[j] /= divisor;
}

double min(const double* v, std::size_t n) {
  __m256d acc = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) acc = _mm256_min_pd(acc, _mm256_loadu_pd(v + j));
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc);
  double m = lanes[0];
  for (std::size_t t = 1; t < kLanes; ++t) m = lanes[t] < m ? lanes[t] : m;
  for (; j < n; ++j) m = v[j] < m ? v[j] : m;
  return m;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
  static const KernelTable t{Isa::avx2, distance_row, exp_shifted_row, sum, scale_row, min};
  return &t;
}

}  // namespace tsplab::kernels::detail

#else

namespace tsplab::kernels::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace tsplab::kernels::detail

#endif
