#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "apc/asymptotics.hpp"
#include "apc/core.hpp"

namespace apc {

/// Periodic moving average
///   X_t = eps_t + sum_q theta_q(t - q) eps_{t-q},  eps_t ~ N(0, sd^2) i.i.d.,
/// with each theta_q periodic of period T (indexed by t mod T).
class PeriodicMAModel {
 public:
  /// coeffs[q] holds theta_q(0..T-1); lags must be >= 1.
  PeriodicMAModel(int period, std::map<int, std::vector<double>> coeffs, double innovation_sd = 1.0);

  /// X_t = theta(t-1) eps_{t-1} + eps_t with theta(t) = (2 + sin(2 pi t / T))^2.
  static PeriodicMAModel pma1(int period);
  /// Stationary X_t = 2 eps_{t-2} + eps_{t-1} + eps_t.
  static PeriodicMAModel ma2();
  static PeriodicMAModel white_noise(double sd = 1.0);

  /// `pma1:T=<T>`, `ma2`, `white`, or `pma:T=<T>;q=<q>;coeffs=<csv>` (q*T values,
  /// lag-major). Each form accepts an optional `;sd=<sd>` suffix.
  static PeriodicMAModel parse(std::string_view text);

  int period() const noexcept { return period_; }
  int max_lag() const noexcept { return max_lag_; }
  double innovation_sd() const noexcept { return sd_; }
  const std::map<int, std::vector<double>>& coeffs() const noexcept { return coeffs_; }
  std::string description() const;

  /// theta_q(t) with t reduced mod T; 0 for lags without coefficients.
  double theta(int q, std::int64_t t) const;

 private:
  // psi_j(t): weight of eps_{t-j} in X_t (psi_0 = 1).
  double psi(int j, std::int64_t t) const;

  friend double autocovariance(const PeriodicMAModel&, std::int64_t, std::int64_t);

  int period_;
  int max_lag_ = 0;
  std::map<int, std::vector<double>> coeffs_;
  double sd_;
  std::string description_;
};

/// n samples X_1..X_n (start_index 0); deterministic in seed.
TimeSeries simulate(const PeriodicMAModel& model, std::size_t n, std::uint64_t seed);

/// Exact B(t, tau) = cov(X_t, X_{t+tau}).
double autocovariance(const PeriodicMAModel& model, std::int64_t t, std::int64_t tau);

/// a(2 pi k / T, tau) = (1/T) sum_{t=0}^{T-1} B(t, tau) e^{-i 2 pi k t / T}.
Complex fourier_coefficient(const PeriodicMAModel& model, int k, std::int64_t tau);

/// Closed-form P(nu, omega) = (1/2pi) sum_tau a(nu - omega, tau) e^{-i nu tau} on the
/// support lines nu - omega = 2 pi k / T (matched to 1e-9), zero elsewhere.
SpectralTruth spectral_truth(const PeriodicMAModel& model);

}  // namespace apc
