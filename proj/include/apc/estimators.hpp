#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "apc/core.hpp"
#include "apc/windows.hpp"

namespace apc {

/// A bifrequency estimate G(nu, omega) with enough metadata to normalize it.
struct SpectralEstimate {
  BifrequencyPoint point;
  Complex value;
  std::size_t n = 0;  // sample length d
  int L = 0;          // bandwidth; equals n for the unsmoothed estimator
  LagWindowSpec window;
  std::vector<std::string> warnings;

  /// sqrt(n / L)
  double normalizer() const { return std::sqrt(static_cast<double>(n) / L); }
};

/// Known finite set of mean frequencies for the demeaned estimator.
class MeanSpec {
 public:
  MeanSpec() = default;
  /// Throws InvalidArgument on duplicates (after canonicalization).
  explicit MeanSpec(std::vector<Frequency> gamma_set);

  const std::vector<Frequency>& gamma_set() const noexcept { return gamma_; }
  bool empty() const noexcept { return gamma_.empty(); }

  /// Every gamma has its reflection 2pi - gamma in the set (to 1e-12).
  bool closed_under_negation() const;

 private:
  std::vector<Frequency> gamma_;
};

/// Unsmoothed estimate (1/(2 pi d)) sum_{s,t} X_s X_t e^{-i nu s} e^{i omega t}
/// over absolute indices s, t = c+1..c+d.
SpectralEstimate raw_bispectral(const TimeSeries& x, BifrequencyPoint p);

/// Lag-window estimate (1/(2 pi d)) sum_{s,t} H_L(s-t) X_s X_t e^{-i nu s} e^{i omega t},
/// evaluated as a lag sum in O(d L). Requires 1 <= L < d.
SpectralEstimate smoothed_bispectral(const TimeSeries& x, const LagWindowSpec& w, int L,
                                     BifrequencyPoint p);

/// |G(nu,omega)| / sqrt(|Re G(nu,nu) Re G(omega,omega)|).
/// Throws DegenerateDenominator when the product is zero.
double coherence_stat(const TimeSeries& x, const LagWindowSpec& w, int L, BifrequencyPoint p);

/// Coherence from already computed estimates.
double coherence_from(Complex g, double g_nu_nu, double g_omega_omega, bool diagonal);

/// Smoothed estimate on X_t minus the fitted almost periodic mean
/// sum_gamma b(gamma) e^{i gamma t}, b(gamma) = (1/d) sum_j X_j e^{-i gamma j}.
/// When the mean set is not closed under negation the imaginary part of the
/// fitted mean is discarded and a warning is attached.
SpectralEstimate demeaned_smoothed_bispectral(const TimeSeries& x, const MeanSpec& mean,
                                              const LagWindowSpec& w, int L, BifrequencyPoint p);

/// Residual series X_t - Re(mu_hat(t)) used by the demeaned estimator.
TimeSeries remove_fourier_mean(const TimeSeries& x, const MeanSpec& mean,
                               double* max_discarded_imag = nullptr);

/// Smoothed estimates over every stride-1 block of length b (offsets 0..n-b),
/// each block using its own absolute indices. Structure-of-arrays output.
struct BlockEstimates {
  std::vector<double> re;
  std::vector<double> im;
  std::size_t size() const noexcept { return re.size(); }
  Complex operator[](std::size_t j) const { return {re[j], im[j]}; }
};

/// Requires 1 <= L < b <= n. Cost O(n L) via per-lag prefix sums.
BlockEstimates block_smoothed_bispectral(const TimeSeries& x, const LagWindowSpec& w,
                                         std::size_t b, int L, BifrequencyPoint p);

}  // namespace apc
