// AVX2+FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; everything else stays portable. When the toolchain lacks
// those flags the functions fall back to the scalar reference and
// compiled_in() reports false, so the dispatcher never selects this backend.

#include "dgs/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace dgs::kernels::avx2 {

bool compiled_in() { return true; }

void axpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_add(std::size_t n, const double* base, double a, const double* dir,
               double* out) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_fmadd_pd(va, _mm256_loadu_pd(dir + i),
                                _mm256_loadu_pd(base + i));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) out[i] = base[i] + a * dir[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  lo = _mm_add_pd(lo, hi);
  double tail = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) tail += x[i] * y[i];
  return tail;
}

namespace {

// e^y for y in [0, 38]: Cody-Waite reduction y = k*ln2 + r, degree-13 Taylor
// on |r| <= ln2/2, then a 2^k exponent build. k stays within [0, 55] here so
// the integer path cannot overflow.
inline __m256d exp_pos(__m256d y) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  __m256d k = _mm256_round_pd(_mm256_mul_pd(y, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, y);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  const double inv_fact[13] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        1.0 / 2.0,
      1.0};
  __m256d p = _mm256_set1_pd(inv_fact[0]);
  for (int j = 1; j < 13; ++j) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[j]));
  }
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  __m256i expo = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(expo));
}

// tanh(x) elementwise.
//  |x| <  0.625 : x + x^3 * P(x^2), P a degree-10 minimax fit (max error of
//                 the fit 1.1e-16 over the interval).
//  |x| >= 0.625 : sign(x) * (1 - 2/(e^{2|x|} + 1)).
//  |x| >= 19    : sign(x) * 1 (2/(e^{2x}+1) < 1e-16 there).
inline __m256d tanh4(__m256d x) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d sign = _mm256_and_pd(x, sign_mask);
  __m256d ax = _mm256_andnot_pd(sign_mask, x);

  static const double P[11] = {
      -0.333333333333333225649,   0.133333333333266577364,
      -0.0539682539613955708212,  0.0218694882605591146453,
      -0.00886322983092570874568, 0.00359205897747345531512,
      -0.00145530929753464202496, 0.000587437286009438189727,
      -0.000230776162695198578995, 0.0000795995573526480800022,
      -0.0000172448744948443301718};
  __m256d u = _mm256_mul_pd(x, x);
  __m256d p = _mm256_set1_pd(P[10]);
  for (int j = 9; j >= 0; --j) {
    p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(P[j]));
  }
  __m256d poly = _mm256_fmadd_pd(_mm256_mul_pd(x, u), p, x);

  __m256d two_ax = _mm256_min_pd(_mm256_add_pd(ax, ax), _mm256_set1_pd(38.0));
  __m256d e = exp_pos(two_ax);
  __m256d big = _mm256_sub_pd(
      _mm256_set1_pd(1.0),
      _mm256_div_pd(_mm256_set1_pd(2.0),
                    _mm256_add_pd(e, _mm256_set1_pd(1.0))));
  big = _mm256_or_pd(big, sign);

  __m256d use_poly = _mm256_cmp_pd(ax, _mm256_set1_pd(0.625), _CMP_LT_OQ);
  __m256d r = _mm256_blendv_pd(big, poly, use_poly);

  __m256d saturated = _mm256_cmp_pd(ax, _mm256_set1_pd(19.0), _CMP_GE_OQ);
  __m256d ones = _mm256_or_pd(_mm256_set1_pd(1.0), sign);
  return _mm256_blendv_pd(r, ones, saturated);
}

}  // namespace

void tanh_inplace(std::size_t n, double* x) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, tanh4(_mm256_loadu_pd(x + i)));
  }
  if (i < n) {
    double buf[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
    __m256d r = tanh4(_mm256_loadu_pd(buf));
    _mm256_storeu_pd(buf, r);
    for (std::size_t j = i; j < n; ++j) x[j] = buf[j - i];
  }
}

void adam_update(std::size_t n, double* theta, double* m, double* v,
                 const double* g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d v1mb1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d v1mb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d ibc1 = _mm256_set1_pd(1.0 / bc1);
  const __m256d ibc2 = _mm256_set1_pd(1.0 / bc2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i),
                                 _mm256_mul_pd(v1mb1, vg));
    __m256d vv = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i),
                                 _mm256_mul_pd(v1mb2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    __m256d mhat = _mm256_mul_pd(vm, ibc1);
    __m256d vhat = _mm256_mul_pd(vv, ibc2);
    __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
    _mm256_storeu_pd(theta + i, _mm256_add_pd(_mm256_loadu_pd(theta + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    double mhat = m[i] * (1.0 / bc1);
    double vhat = v[i] * (1.0 / bc2);
    theta[i] += lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace dgs::kernels::avx2

#else  // no AVX2+FMA toolchain support: forward to the scalar reference

namespace dgs::kernels::avx2 {

bool compiled_in() { return false; }

void axpy(std::size_t n, double a, const double* x, double* y) {
  scalar::axpy(n, a, x, y);
}
void scale_add(std::size_t n, const double* base, double a, const double* dir,
               double* out) {
  scalar::scale_add(n, base, a, dir, out);
}
double dot(std::size_t n, const double* x, const double* y) {
  return scalar::dot(n, x, y);
}
void tanh_inplace(std::size_t n, double* x) { scalar::tanh_inplace(n, x); }
void adam_update(std::size_t n, double* theta, double* m, double* v,
                 const double* g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  scalar::adam_update(n, theta, m, v, g, lr, beta1, beta2, eps, bc1, bc2);
}

}  // namespace dgs::kernels::avx2

#endif
