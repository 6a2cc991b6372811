// AVX2 kernel variants. This translation unit is compiled with
// -mavx2 -mfma; nothing here may run unless the dispatcher verified CPU
// support. Elementwise kernels (axpy/scale/lerp/adamw) mirror the scalar
// operation order exactly, without FMA, so they are bit-identical to the
// reference. Reductions use 4-lane accumulators and the vector exp uses a
// polynomial, so those agree with the reference only to rounding; see
// tests/test_kernels.cpp for the two equivalence contracts.

#include "costar/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace costar::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double max_value_avx2(const double* x, std::size_t n) {
  if (n < 4) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) {
      if (x[i] > m) m = x[i];
    }
    return m;
  }
  __m256d acc = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  }
  double m = hmax(acc);
  for (; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), av));
  }
  for (; i < n; ++i) x[i] *= a;
}

void lerp_avx2(double keep, const double* src, double* dst, std::size_t n) {
  const __m256d kv = _mm256_set1_pd(keep);
  const __m256d tv = _mm256_set1_pd(1.0 - keep);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_mul_pd(kv, _mm256_loadu_pd(dst + i));
    const __m256d s = _mm256_mul_pd(tv, _mm256_loadu_pd(src + i));
    _mm256_storeu_pd(dst + i, _mm256_add_pd(d, s));
  }
  const double take = 1.0 - keep;
  for (; i < n; ++i) dst[i] = keep * dst[i] + take * src[i];
}

// exp on 4 lanes; range-reduced rational approximation (Cephes exp.c
// layout). Arguments below -708.396 flush to +0 instead of producing
// subnormals; softmax-style callers only see non-positive arguments, so
// the sum they normalize by is unaffected.
inline __m256d exp4(__m256d x) {
  const __m256d kMaxArg = _mm256_set1_pd(709.436);
  const __m256d kMinArg = _mm256_set1_pd(-708.396);
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d kC1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d kC2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d kHalf = _mm256_set1_pd(0.5);
  const __m256d kOne = _mm256_set1_pd(1.0);
  const __m256d kTwo = _mm256_set1_pd(2.0);

  const __m256d kP0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d kP1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d kP2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d kQ0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d kQ1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d kQ2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d kQ3 = _mm256_set1_pd(2.00000000000000000005e0);

  const __m256d underflow = _mm256_cmp_pd(x, kMinArg, _CMP_LT_OQ);
  x = _mm256_min_pd(x, kMaxArg);
  x = _mm256_max_pd(x, kMinArg);

  // n = floor(log2(e)*x + 0.5)
  const __m256d nf =
      _mm256_floor_pd(_mm256_fmadd_pd(kLog2e, x, kHalf));
  // r = x - n*ln2, split into hi/lo for accuracy
  __m256d r = _mm256_fnmadd_pd(nf, kC1, x);
  r = _mm256_fnmadd_pd(nf, kC2, r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(kP0, rr, kP1);
  p = _mm256_fmadd_pd(p, rr, kP2);
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_fmadd_pd(kQ0, rr, kQ1);
  q = _mm256_fmadd_pd(q, rr, kQ2);
  q = _mm256_fmadd_pd(q, rr, kQ3);

  // e^r = 1 + 2p/(q - p)
  const __m256d e =
      _mm256_add_pd(kOne, _mm256_div_pd(_mm256_mul_pd(kTwo, p),
                                        _mm256_sub_pd(q, p)));

  // scale by 2^n through the exponent field
  const __m128i n32 = _mm256_cvtpd_epi32(nf);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i expo = _mm256_slli_epi64(
      _mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  const __m256d scale = _mm256_castsi256_pd(expo);
  __m256d result = _mm256_mul_pd(e, scale);
  result = _mm256_andnot_pd(underflow, result);
  return result;
}

void exp_shift_scale_avx2(const double* z, double shift, double inv_t,
                          double* out, std::size_t n) {
  const __m256d sh = _mm256_set1_pd(shift);
  const __m256d it = _mm256_set1_pd(inv_t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d arg =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(z + i), sh), it);
    _mm256_storeu_pd(out + i, exp4(arg));
  }
  if (i < n) {
    double buf_in[4] = {0, 0, 0, 0};
    double buf_out[4];
    for (std::size_t j = i; j < n; ++j) buf_in[j - i] = z[j];
    const __m256d arg =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(buf_in), sh), it);
    _mm256_storeu_pd(buf_out, exp4(arg));
    for (std::size_t j = i; j < n; ++j) out[j] = buf_out[j - i];
  }
}

void adamw_update_avx2(double* w, const double* g, double* m, double* v,
                       std::size_t n, const AdamParams& p) {
  const __m256d b1 = _mm256_set1_pd(p.beta1);
  const __m256d ob1 = _mm256_set1_pd(1.0 - p.beta1);
  const __m256d b2 = _mm256_set1_pd(p.beta2);
  const __m256d ob2 = _mm256_set1_pd(1.0 - p.beta2);
  const __m256d c1 = _mm256_set1_pd(p.bias1);
  const __m256d c2 = _mm256_set1_pd(p.bias2);
  const __m256d eps = _mm256_set1_pd(p.eps);
  const __m256d wd = _mm256_set1_pd(p.weight_decay);
  const __m256d lr = _mm256_set1_pd(p.lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gv = _mm256_loadu_pd(g + i);
    __m256d mv = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    mv = _mm256_add_pd(_mm256_mul_pd(b1, mv), _mm256_mul_pd(ob1, gv));
    vv = _mm256_add_pd(_mm256_mul_pd(b2, vv),
                       _mm256_mul_pd(ob2, _mm256_mul_pd(gv, gv)));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_mul_pd(mv, c1);
    const __m256d vhat = _mm256_mul_pd(vv, c2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), eps);
    __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d step = _mm256_mul_pd(
        lr, _mm256_add_pd(_mm256_div_pd(mhat, denom), _mm256_mul_pd(wd, wv)));
    _mm256_storeu_pd(w + i, _mm256_sub_pd(wv, step));
  }
  for (; i < n; ++i) {
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g[i];
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * (g[i] * g[i]);
    const double mhat = m[i] * p.bias1;
    const double vhat = v[i] * p.bias2;
    w[i] -= p.lr * (mhat / (std::sqrt(vhat) + p.eps) + p.weight_decay * w[i]);
  }
}

}  // namespace

const Backend* avx2_backend_table() {
  static const Backend table = {
      "avx2",          dot_avx2,  sum_avx2,
      max_value_avx2,  axpy_avx2, scale_avx2,
      lerp_avx2,       exp_shift_scale_avx2,
      adamw_update_avx2,
  };
  return &table;
}

}  // namespace costar::kernels

#else

namespace costar::kernels {
const Backend* avx2_backend_table() { return nullptr; }
}  // namespace costar::kernels

#endif
