// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "apc/kernels.hpp"

namespace apc::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void lag_phase_sums(std::span<const double> x, std::span<const double> phase_re,
                    std::span<const double> phase_im, std::span<std::complex<double>> out) {
  const std::size_t n = x.size();
  const double* xp = x.data();
  const double* pr = phase_re.data();
  const double* pi = phase_im.data();
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k >= n) {
      out[k] = {0.0, 0.0};
      continue;
    }
    const std::size_t count = n - k;
    __m256d acc_re0 = _mm256_setzero_pd();
    __m256d acc_im0 = _mm256_setzero_pd();
    __m256d acc_re1 = _mm256_setzero_pd();
    __m256d acc_im1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= count; i += 8) {
      const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(xp + i + k), _mm256_loadu_pd(xp + i));
      const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(xp + i + k + 4), _mm256_loadu_pd(xp + i + 4));
      acc_re0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(pr + i), acc_re0);
      acc_im0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(pi + i), acc_im0);
      acc_re1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(pr + i + 4), acc_re1);
      acc_im1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(pi + i + 4), acc_im1);
    }
    double re = hsum(_mm256_add_pd(acc_re0, acc_re1));
    double im = hsum(_mm256_add_pd(acc_im0, acc_im1));
    for (; i < count; ++i) {
      const double p = xp[i + k] * xp[i];
      re += p * pr[i];
      im += p * pi[i];
    }
    out[k] = {re, im};
  }
}

void combine_block_sums(std::span<const PrefixLane> lanes, std::span<double> out_re,
                        std::span<double> out_im) {
  const std::size_t m = out_re.size();
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    for (const PrefixLane& lane : lanes) {
      const __m256d d_re = _mm256_sub_pd(_mm256_loadu_pd(lane.re.data() + j + lane.span),
                                         _mm256_loadu_pd(lane.re.data() + j));
      const __m256d d_im = _mm256_sub_pd(_mm256_loadu_pd(lane.im.data() + j + lane.span),
                                         _mm256_loadu_pd(lane.im.data() + j));
      const __m256d c_re = _mm256_set1_pd(lane.coef.real());
      const __m256d c_im = _mm256_set1_pd(lane.coef.imag());
      acc_re = _mm256_fmadd_pd(c_re, d_re, acc_re);
      acc_re = _mm256_fnmadd_pd(c_im, d_im, acc_re);
      acc_im = _mm256_fmadd_pd(c_re, d_im, acc_im);
      acc_im = _mm256_fmadd_pd(c_im, d_re, acc_im);
    }
    _mm256_storeu_pd(out_re.data() + j, acc_re);
    _mm256_storeu_pd(out_im.data() + j, acc_im);
  }
  for (; j < m; ++j) {
    double acc_re = 0.0;
    double acc_im = 0.0;
    for (const PrefixLane& lane : lanes) {
      const double d_re = lane.re[j + lane.span] - lane.re[j];
      const double d_im = lane.im[j + lane.span] - lane.im[j];
      acc_re += lane.coef.real() * d_re - lane.coef.imag() * d_im;
      acc_im += lane.coef.real() * d_im + lane.coef.imag() * d_re;
    }
    out_re[j] = acc_re;
    out_im[j] = acc_im;
  }
}

void magnitudes(std::span<const double> re, std::span<const double> im, std::span<double> out) {
  const std::size_t m = out.size();
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d r = _mm256_loadu_pd(re.data() + j);
    const __m256d i = _mm256_loadu_pd(im.data() + j);
    const __m256d sq = _mm256_fmadd_pd(r, r, _mm256_mul_pd(i, i));
    _mm256_storeu_pd(out.data() + j, _mm256_sqrt_pd(sq));
  }
  for (; j < m; ++j) out[j] = std::sqrt(re[j] * re[j] + im[j] * im[j]);
}

void coherence_ratios(std::span<const double> re, std::span<const double> im,
                      std::span<const double> diag_a, std::span<const double> diag_b,
                      std::span<double> out) {
  const std::size_t m = out.size();
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d nan = _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN());
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d r = _mm256_loadu_pd(re.data() + j);
    const __m256d i = _mm256_loadu_pd(im.data() + j);
    const __m256d mag = _mm256_sqrt_pd(_mm256_fmadd_pd(r, r, _mm256_mul_pd(i, i)));
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(diag_a.data() + j), _mm256_loadu_pd(diag_b.data() + j));
    const __m256d denom = _mm256_andnot_pd(sign_mask, prod);
    const __m256d ratio = _mm256_div_pd(mag, _mm256_sqrt_pd(denom));
    const __m256d is_zero = _mm256_cmp_pd(denom, zero, _CMP_EQ_OQ);
    _mm256_storeu_pd(out.data() + j, _mm256_blendv_pd(ratio, nan, is_zero));
  }
  for (; j < m; ++j) {
    const double denom = std::abs(diag_a[j] * diag_b[j]);
    out[j] = denom == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                          : std::sqrt(re[j] * re[j] + im[j] * im[j]) / std::sqrt(denom);
  }
}

}  // namespace apc::kernels::avx2
