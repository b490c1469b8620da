#pragma once

// Inner loops of the estimators. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2+FMA variant chosen at runtime.
// The variants differ only in summation order; tests hold them to 1e-12.

#include <complex>
#include <cstddef>
#include <span>

namespace apc::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa) noexcept;

/// True if this build contains the variant and the CPU can run it.
bool isa_available(Isa isa) noexcept;

/// Best available ISA; `APC_SPECTRA_ISA=scalar` in the environment forces the
/// reference path.
Isa active_isa() noexcept;

/// For k = 0..out.size()-1:
///   out[k] = sum_{i=0}^{n-1-k} x[i+k] * x[i] * (phase_re[i] + i*phase_im[i])
void lag_phase_sums(std::span<const double> x, std::span<const double> phase_re,
                    std::span<const double> phase_im, std::span<std::complex<double>> out,
                    Isa isa = active_isa());

/// One lag term of a block sum: coef * (prefix[j + span] - prefix[j]).
struct PrefixLane {
  std::span<const double> re;
  std::span<const double> im;
  std::size_t span = 0;
  std::complex<double> coef;
};

/// out[j] = sum over lanes of coef * (prefix[j + span] - prefix[j]) for j < out_re.size().
void combine_block_sums(std::span<const PrefixLane> lanes, std::span<double> out_re,
                        std::span<double> out_im, Isa isa = active_isa());

/// out[j] = |re[j] + i*im[j]|
void magnitudes(std::span<const double> re, std::span<const double> im, std::span<double> out,
                Isa isa = active_isa());

/// out[j] = |re[j] + i*im[j]| / sqrt(|diag_a[j] * diag_b[j]|), NaN where the product is 0.
void coherence_ratios(std::span<const double> re, std::span<const double> im,
                      std::span<const double> diag_a, std::span<const double> diag_b,
                      std::span<double> out, Isa isa = active_isa());

namespace scalar {
void lag_phase_sums(std::span<const double> x, std::span<const double> phase_re,
                    std::span<const double> phase_im, std::span<std::complex<double>> out);
void combine_block_sums(std::span<const PrefixLane> lanes, std::span<double> out_re,
                        std::span<double> out_im);
void magnitudes(std::span<const double> re, std::span<const double> im, std::span<double> out);
void coherence_ratios(std::span<const double> re, std::span<const double> im,
                      std::span<const double> diag_a, std::span<const double> diag_b,
                      std::span<double> out);
}  // namespace scalar

#if defined(APC_HAVE_AVX2_KERNELS)
namespace avx2 {
void lag_phase_sums(std::span<const double> x, std::span<const double> phase_re,
                    std::span<const double> phase_im, std::span<std::complex<double>> out);
void combine_block_sums(std::span<const PrefixLane> lanes, std::span<double> out_re,
                        std::span<double> out_im);
void magnitudes(std::span<const double> re, std::span<const double> im, std::span<double> out);
void coherence_ratios(std::span<const double> re, std::span<const double> im,
                      std::span<const double> diag_a, std::span<const double> diag_b,
                      std::span<double> out);
}  // namespace avx2
#endif

}  // namespace apc::kernels
