#include "apc/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

namespace apc::kernels {

namespace scalar {

void lag_phase_sums(std::span<const double> x, std::span<const double> phase_re,
                    std::span<const double> phase_im, std::span<std::complex<double>> out) {
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc_re = 0.0;
    double acc_im = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) {
      const double p = x[i + k] * x[i];
      acc_re += p * phase_re[i];
      acc_im += p * phase_im[i];
    }
    out[k] = {acc_re, acc_im};
  }
}

void combine_block_sums(std::span<const PrefixLane> lanes, std::span<double> out_re,
                        std::span<double> out_im) {
  const std::size_t m = out_re.size();
  for (std::size_t j = 0; j < m; ++j) {
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
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::sqrt(re[j] * re[j] + im[j] * im[j]);
}

void coherence_ratios(std::span<const double> re, std::span<const double> im,
                      std::span<const double> diag_a, std::span<const double> diag_b,
                      std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double denom = std::abs(diag_a[j] * diag_b[j]);
    out[j] = denom == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                          : std::sqrt(re[j] * re[j] + im[j] * im[j]) / std::sqrt(denom);
  }
}

}  // namespace scalar

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(APC_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  static const Isa selected = [] {
    const char* forced = std::getenv("APC_SPECTRA_ISA");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::Scalar;
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return selected;
}

#if defined(APC_HAVE_AVX2_KERNELS)
#define APC_DISPATCH(fn, ...)                                   \
  do {                                                          \
    if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) {        \
      avx2::fn(__VA_ARGS__);                                    \
      return;                                                   \
    }                                                           \
    scalar::fn(__VA_ARGS__);                                    \
  } while (false)
#else
#define APC_DISPATCH(fn, ...) \
  do {                        \
    (void)isa;                \
    scalar::fn(__VA_ARGS__);  \
  } while (false)
#endif

void lag_phase_sums(std::span<const double> x, std::span<const double> phase_re,
                    std::span<const double> phase_im, std::span<std::complex<double>> out, Isa isa) {
  APC_DISPATCH(lag_phase_sums, x, phase_re, phase_im, out);
}

void combine_block_sums(std::span<const PrefixLane> lanes, std::span<double> out_re,
                        std::span<double> out_im, Isa isa) {
  APC_DISPATCH(combine_block_sums, lanes, out_re, out_im);
}

void magnitudes(std::span<const double> re, std::span<const double> im, std::span<double> out, Isa isa) {
  APC_DISPATCH(magnitudes, re, im, out);
}

void coherence_ratios(std::span<const double> re, std::span<const double> im,
                      std::span<const double> diag_a, std::span<const double> diag_b,
                      std::span<double> out, Isa isa) {
  APC_DISPATCH(coherence_ratios, re, im, diag_a, diag_b, out);
}

#undef APC_DISPATCH

}  // namespace apc::kernels
