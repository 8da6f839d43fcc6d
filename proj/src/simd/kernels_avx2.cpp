#include "simd/kernel_variants.hpp"

#if defined(ZIPFIT_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// Functions are compiled for AVX2/FMA through target attributes rather than
// per-file flags, so nothing inline from the standard headers gets emitted
// with VEX encodings and leaks into the generic code via ODR merging.
#define ZIPFIT_AVX2 __attribute__((target("avx2,fma")))

namespace zipfit::simd::detail {
namespace {

// exp: round-to-nearest reduction x = n*ln2 + r, |r| <= ln2/2, Cephes Pade
// form for exp(r), scale by 2^n assembled in the exponent field.
ZIPFIT_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d lower = _mm256_set1_pd(kExpFlushArg);
  const __m256d upper = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  const __m256d overflow = _mm256_cmp_pd(x, upper, _CMP_GT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lower), upper);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878E-4), rr,
                              _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042E-6), rr,
                              _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(e, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  // n is integral and |n| < 2^51: adding 1.5*2^52 leaves it in the low bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i bits = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                  _mm256_castpd_si256(magic));
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));

  e = _mm256_andnot_pd(underflow, e);
  return _mm256_blendv_pd(e, _mm256_set1_pd(HUGE_VAL), overflow);
}

// log for positive normal inputs: x = m * 2^e with m in (sqrt(1/2), sqrt(2)],
// ln(m) = 2 atanh(s), s = (m-1)/(m+1), |s| < 0.1716, series to s^23.
ZIPFIT_AVX2 inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(two52))), two52);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                      _mm256_set1_epi64x(0x3FF0000000000000LL)));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730950488), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(2.0 / 23.0);
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 21.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 19.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 17.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 15.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 13.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 11.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 9.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 7.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 5.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(2.0 / 3.0));
  // 2s + s*s2*p, then add e*ln2 split into an exact high part and a low part
  __m256d lm = _mm256_mul_pd(_mm256_mul_pd(s, s2), p);
  lm = _mm256_fmadd_pd(e, _mm256_set1_pd(1.90821492927058770002e-10), lm);
  lm = _mm256_fmadd_pd(s, _mm256_set1_pd(2.0), lm);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(6.93147180369123816490e-01), lm);
}

ZIPFIT_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Lanes i with i >= remaining are masked off.
ZIPFIT_AVX2 inline __m256d lane_mask(std::int64_t remaining) {
  const __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  return _mm256_castsi256_pd(_mm256_cmpgt_epi64(_mm256_set1_epi64x(remaining), idx));
}

ZIPFIT_AVX2 double sum_exp_log_quadratic(std::int64_t first, std::int64_t count,
                                         const LogQuadratic& g) {
  const __m256d c0 = _mm256_set1_pd(g.c0);
  const __m256d c1 = _mm256_set1_pd(g.log_coef);
  const __m256d c2 = _mm256_set1_pd(g.log2_coef);
  const __m256d cx = _mm256_set1_pd(g.lin_coef);
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d x = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(first)),
                            _mm256_setr_pd(0.0, 1.0, 2.0, 3.0));
  __m256d acc = _mm256_setzero_pd();
  std::int64_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d l = log_pd(x);
    const __m256d arg = _mm256_fmadd_pd(cx, x, _mm256_fmadd_pd(l, _mm256_fmadd_pd(l, c2, c1), c0));
    acc = _mm256_add_pd(acc, exp_pd(arg));
    x = _mm256_add_pd(x, step);
  }
  if (i < count) {
    const __m256d l = log_pd(x);
    const __m256d arg = _mm256_fmadd_pd(cx, x, _mm256_fmadd_pd(l, _mm256_fmadd_pd(l, c2, c1), c0));
    acc = _mm256_add_pd(acc, _mm256_and_pd(lane_mask(count - i), exp_pd(arg)));
  }
  return hsum(acc);
}

ZIPFIT_AVX2 double sum_exp_stretched(std::int64_t first, std::int64_t count,
                                     const LogStretched& g) {
  const __m256d c0 = _mm256_set1_pd(g.c0);
  const __m256d c1 = _mm256_set1_pd(g.log_coef);
  const __m256d lambda = _mm256_set1_pd(g.lambda);
  const __m256d beta = _mm256_set1_pd(g.beta);
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d x = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(first)),
                            _mm256_setr_pd(0.0, 1.0, 2.0, 3.0));
  __m256d acc = _mm256_setzero_pd();
  for (std::int64_t i = 0; i < count; i += 4) {
    const __m256d l = log_pd(x);
    const __m256d xb = exp_pd(_mm256_mul_pd(beta, l));
    const __m256d arg = _mm256_fnmadd_pd(lambda, xb, _mm256_fmadd_pd(c1, l, c0));
    __m256d v = exp_pd(arg);
    if (count - i < 4) v = _mm256_and_pd(lane_mask(count - i), v);
    acc = _mm256_add_pd(acc, v);
    x = _mm256_add_pd(x, step);
  }
  return hsum(acc);
}

ZIPFIT_AVX2 double weighted_sum_exp(std::span<const double> w, std::span<const double> v,
                                    double scale) {
  const std::size_t n = w.size();
  const double* wp = w.data();
  const double* vp = v.data();
  const __m256d s = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = exp_pd(_mm256_mul_pd(s, _mm256_loadu_pd(vp + i)));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(wp + i), e, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += wp[i] * std::exp(scale * vp[i]);
  return hsum(acc) + tail;
}

ZIPFIT_AVX2 double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* ap = a.data();
  const double* bp = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(ap + i), _mm256_loadu_pd(bp + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(ap + i + 4), _mm256_loadu_pd(bp + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(ap + i), _mm256_loadu_pd(bp + i), acc0);
  double tail = 0.0;
  for (; i < n; ++i) tail += ap[i] * bp[i];
  return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

ZIPFIT_AVX2 double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* ap = a.data();
  const double* bp = b.data();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(ap + i), _mm256_loadu_pd(bp + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::max(r, std::abs(ap[i] - bp[i]));
  return r;
}

ZIPFIT_AVX2 void log_array(std::span<const double> in, std::span<double> out) {
  const std::size_t n = in.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, log_pd(_mm256_loadu_pd(in.data() + i)));
  for (; i < n; ++i) out[i] = std::log(in[i]);
}

ZIPFIT_AVX2 void exp_array(std::span<const double> in, std::span<double> out) {
  const std::size_t n = in.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, exp_pd(_mm256_loadu_pd(in.data() + i)));
  for (; i < n; ++i) out[i] = in[i] < kExpFlushArg ? 0.0 : std::exp(in[i]);
}

}  // namespace

const KernelTable kAvx2Table{
    "avx2",       sum_exp_log_quadratic, sum_exp_stretched, weighted_sum_exp,
    dot,          max_abs_diff,          log_array,         exp_array,
};

}  // namespace zipfit::simd::detail

#endif  // ZIPFIT_HAVE_AVX2
