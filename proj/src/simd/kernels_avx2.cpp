// AVX2 + FMA variants of the kernel table. This translation unit is the only
// one compiled with -mavx2 -mfma; nothing here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "tsmc/simd/kernels.hpp"

namespace tsmc::simd {

namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d a = _mm_add_pd(lo, _mm_unpackhi_pd(lo, lo));  // l0 + l1
  const __m128d b = _mm_add_pd(hi, _mm_unpackhi_pd(hi, hi));  // l2 + l3
  return _mm_cvtsd_f64(_mm_add_sd(a, b));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

// Load up to four doubles, padding missing lanes with `fill`.
inline __m256d load_partial(const double* x, std::size_t n, double fill) {
  alignas(32) double buf[kLanes] = {fill, fill, fill, fill};
  for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
  return _mm256_load_pd(buf);
}

inline void store_partial(double* out, std::size_t n, __m256d v) {
  alignas(32) double buf[kLanes];
  _mm256_store_pd(buf, v);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i];
}

// 2^k for integral-valued k in [-1022, 1023].
inline __m256d pow2i(__m256d k) {
  const __m256d magic = _mm256_set1_pd(0x1.8p52);
  const __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)),
                                      _mm256_castpd_si256(magic));
  return _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52));
}

// exp(x) with ~1 ulp error; handles +-inf, NaN, overflow and the subnormal range.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.782712893384);
  const __m256d lo = _mm256_set1_pd(-745.1332191019412);
  const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), xc);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  // Taylor series to degree 13 on |r| <= ln2/2.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // Split the scaling so n = 1024 and the subnormal range stay exact.
  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(n, n1);
  __m256d y = _mm256_mul_pd(_mm256_mul_pd(p, pow2i(n1)), pow2i(n2));

  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  y = _mm256_blendv_pd(y, inf, _mm256_cmp_pd(x, hi, _CMP_GT_OQ));
  y = _mm256_blendv_pd(y, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo, _CMP_LT_OQ));
  y = _mm256_blendv_pd(y, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return y;
}

// Natural log for positive normal x.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_exp = _mm256_set1_epi64x(0x3FF0000000000000LL);

  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256d magic = _mm256_set1_pd(0x1.8p52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_add_epi64(_mm256_castpd_si256(magic),
                                           _mm256_sub_epi64(biased, _mm256_set1_epi64x(1023)))),
      magic);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_exp));

  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s = _mm256_mul_pd(f, f);
  // atanh series: log m = 2 f sum_k s^k / (2k+1)
  __m256d p = _mm256_set1_pd(1.0 / 23.0);
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 21.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(1.0 / 3.0));
  // log m = 2f + 2f s p
  const __m256d twof = _mm256_add_pd(f, f);
  const __m256d logm = _mm256_fmadd_pd(_mm256_mul_pd(twof, s), p, twof);

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  return _mm256_fmadd_pd(e, ln2_hi, _mm256_fmadd_pd(e, ln2_lo, logm));
}

// sin and cos of 2 pi v for v in [0, 1).
inline void sincos_2pi(__m256d v, __m256d* s, __m256d* c) {
  const __m256d w = _mm256_mul_pd(v, _mm256_set1_pd(4.0));
  const __m256d q = _mm256_round_pd(w, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_mul_pd(_mm256_sub_pd(w, q), _mm256_set1_pd(1.5707963267948966));
  const __m256d r2 = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(-1.0 / 1307674368000.0);
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 6227020800.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 39916800.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 362880.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 5040.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 120.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 6.0));
  const __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(ps, r2), r, r);

  __m256d pc = _mm256_set1_pd(1.0 / 20922789888000.0);
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 87178291200.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 479001600.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 3628800.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 40320.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 720.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 24.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-0.5));
  const __m256d cr = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0));

  // quadrant q mod 4
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d qm = _mm256_sub_pd(q, _mm256_mul_pd(four, _mm256_floor_pd(_mm256_mul_pd(q, _mm256_set1_pd(0.25)))));
  const __m256d is1 = _mm256_cmp_pd(qm, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
  const __m256d is2 = _mm256_cmp_pd(qm, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d is3 = _mm256_cmp_pd(qm, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
  const __m256d odd = _mm256_or_pd(is1, is3);
  const __m256d sign = _mm256_set1_pd(-0.0);

  __m256d sv = _mm256_blendv_pd(sr, cr, odd);
  __m256d cv = _mm256_blendv_pd(cr, sr, odd);
  sv = _mm256_xor_pd(sv, _mm256_and_pd(_mm256_or_pd(is2, is3), sign));
  cv = _mm256_xor_pd(cv, _mm256_and_pd(_mm256_or_pd(is1, is2), sign));
  *s = sv;
  *c = cv;
}

// Exact u64 -> double conversion of bits >> 12 (52-bit integers).
inline __m256d top52_to_pd(__m256i b) {
  const __m256d two52 = _mm256_set1_pd(0x1.0p52);
  const __m256i k = _mm256_srli_epi64(b, 12);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(k, _mm256_castpd_si256(two52))), two52);
}

double max_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  if (i < n) acc = _mm256_max_pd(acc, load_partial(x + i, n - i, -std::numeric_limits<double>::infinity()));
  return hmax(acc);
}

double sum_exp_avx2(const double* x, std::size_t n, double shift) {
  const __m256d sh = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), sh)));
  if (i < n) {
    const __m256d v = load_partial(x + i, n - i, -std::numeric_limits<double>::infinity());
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(v, sh)));
  }
  return hsum(acc);
}

void sum_exp2_avx2(const double* x, std::size_t n, double shift, double* s1, double* s2) {
  const __m256d sh = _mm256_set1_pd(shift);
  __m256d a = _mm256_setzero_pd();
  __m256d b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), sh));
    a = _mm256_add_pd(a, e);
    b = _mm256_fmadd_pd(e, e, b);
  }
  if (i < n) {
    const __m256d e =
        exp_pd(_mm256_sub_pd(load_partial(x + i, n - i, -std::numeric_limits<double>::infinity()), sh));
    a = _mm256_add_pd(a, e);
    b = _mm256_fmadd_pd(e, e, b);
  }
  *s1 = hsum(a);
  *s2 = hsum(b);
}

void exp_shift_avx2(const double* x, std::size_t n, double shift, double* out) {
  const __m256d sh = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), sh)));
  if (i < n) store_partial(out + i, n - i, exp_pd(_mm256_sub_pd(load_partial(x + i, n - i, 0.0), sh)));
}

void axpy_avx2(const double* base, const double* slope, std::size_t n, double a, double* out) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(slope + i), _mm256_loadu_pd(base + i)));
  }
  for (; i < n; ++i) out[i] = std::fma(a, slope[i], base[i]);
}

void affine_update_avx2(double* h, std::size_t n, double a, double b, const double* z) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d bz = _mm256_mul_pd(bv, _mm256_loadu_pd(z + i));
    _mm256_storeu_pd(h + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(h + i), bz));
  }
  for (; i < n; ++i) h[i] = std::fma(a, h[i], b * z[i]);
}

void box_muller_avx2(const std::uint64_t* bits, std::size_t pairs, double* out) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d ulp = _mm256_set1_pd(0x1.0p-52);
  const __m256d minus_two = _mm256_set1_pd(-2.0);
  std::size_t p = 0;
  for (; p + kLanes <= pairs; p += kLanes) {
    const __m256i b1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + p));
    const __m256i b2 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + pairs + p));
    const __m256d u1 = _mm256_mul_pd(_mm256_add_pd(top52_to_pd(b1), half), ulp);
    const __m256d u2 = _mm256_mul_pd(top52_to_pd(b2), ulp);
    const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(minus_two, log_pd(u1)));
    __m256d s, c;
    sincos_2pi(u2, &s, &c);
    _mm256_storeu_pd(out + p, _mm256_mul_pd(r, c));
    _mm256_storeu_pd(out + pairs + p, _mm256_mul_pd(r, s));
  }
  if (p < pairs) {
    const std::size_t rem = pairs - p;
    alignas(32) std::uint64_t t1[kLanes] = {0, 0, 0, 0};
    alignas(32) std::uint64_t t2[kLanes] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < rem; ++i) {
      t1[i] = bits[p + i];
      t2[i] = bits[pairs + p + i];
    }
    const __m256d u1 = _mm256_mul_pd(_mm256_add_pd(top52_to_pd(_mm256_load_si256(reinterpret_cast<const __m256i*>(t1))), half), ulp);
    const __m256d u2 = _mm256_mul_pd(top52_to_pd(_mm256_load_si256(reinterpret_cast<const __m256i*>(t2))), ulp);
    const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(minus_two, log_pd(u1)));
    __m256d s, c;
    sincos_2pi(u2, &s, &c);
    store_partial(out + p, rem, _mm256_mul_pd(r, c));
    store_partial(out + pairs + p, rem, _mm256_mul_pd(r, s));
  }
}

void neg_log_uniform_avx2(const std::uint64_t* bits, std::size_t n, double* out) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d ulp = _mm256_set1_pd(0x1.0p-52);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    const __m256d u = _mm256_mul_pd(_mm256_add_pd(top52_to_pd(b), half), ulp);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(zero, log_pd(u)));
  }
  if (i < n) {
    alignas(32) std::uint64_t t[kLanes] = {0, 0, 0, 0};
    for (std::size_t k = 0; k < n - i; ++k) t[k] = bits[i + k];
    const __m256d u = _mm256_mul_pd(_mm256_add_pd(top52_to_pd(_mm256_load_si256(reinterpret_cast<const __m256i*>(t))), half), ulp);
    store_partial(out + i, n - i, _mm256_sub_pd(zero, log_pd(u)));
  }
}

void sv_logpdf_avx2(const double* h1, const double* h2, std::size_t n, double e1sq, double e2sq, double c,
                    double* out) {
  const __m256d a1 = _mm256_set1_pd(e1sq);
  const __m256d a2 = _mm256_set1_pd(e2sq);
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d mhalf = _mm256_set1_pd(-0.5);
  const __m256d zero = _mm256_setzero_pd();
  auto body = [&](__m256d x1, __m256d x2) {
    __m256d q = _mm256_add_pd(x1, x2);
    q = _mm256_fmadd_pd(a1, exp_pd(_mm256_sub_pd(zero, x1)), q);
    q = _mm256_fmadd_pd(a2, exp_pd(_mm256_sub_pd(zero, x2)), q);
    return _mm256_fmadd_pd(mhalf, q, cv);
  };
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, body(_mm256_loadu_pd(h1 + i), _mm256_loadu_pd(h2 + i)));
  if (i < n) store_partial(out + i, n - i, body(load_partial(h1 + i, n - i, 0.0), load_partial(h2 + i, n - i, 0.0)));
}

void gauss_logpdf_acc_avx2(const double* s, std::size_t n, double resid, double inv_var, double c, double* out) {
  const __m256d rv = _mm256_set1_pd(resid);
  const __m256d k = _mm256_set1_pd(-0.5 * inv_var);
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(rv, _mm256_loadu_pd(s + i));
    const __m256d term = _mm256_fmadd_pd(_mm256_mul_pd(k, d), d, cv);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), term));
  }
  for (; i < n; ++i) {
    const double d = resid - s[i];
    out[i] += c - 0.5 * inv_var * d * d;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      "avx2",         max_avx2,           sum_exp_avx2,         sum_exp2_avx2,
      exp_shift_avx2, axpy_avx2,          affine_update_avx2,   box_muller_avx2,
      neg_log_uniform_avx2, sv_logpdf_avx2, gauss_logpdf_acc_avx2,
  };
  return table;
}

}  // namespace tsmc::simd
