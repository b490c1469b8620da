#pragma once

#include <array>
#include <functional>
#include <variant>
#include <vector>

#include "apc/core.hpp"
#include "apc/random.hpp"

namespace apc {

/// Spectral density extension P(nu, omega) on the bifrequency square.
/// g0(nu) = Re P(nu, nu). Implementations must be callable concurrently.
struct SpectralTruth {
  std::function<Complex(BifrequencyPoint)> P;

  Complex operator()(BifrequencyPoint p) const { return P(p); }
  double g0(Frequency nu) const { return P({nu, nu}).real(); }

  static SpectralTruth zero();
};

/// Symmetric 2x2 covariance.
struct Cov2 {
  double s11 = 0.0;
  double s12 = 0.0;
  double s22 = 0.0;

  /// Ascending eigenvalues.
  std::array<double, 2> eigenvalues() const;
};

/// Symmetric 4x4 covariance stored as its lower triangle.
class Cov4 {
 public:
  double operator()(int i, int j) const;
  void set(int i, int j, double v);
  /// Ascending eigenvalues.
  std::array<double, 4> eigenvalues() const;
  /// Number of eigenvalues above tol * (largest |eigenvalue|).
  int rank(double tol = 1e-10) const;

 private:
  static int index(int i, int j);
  std::array<double, 10> lower_{};
};

struct FoldedBivariateNormal {
  Cov2 cov;
  double scale = 1.0;
};

struct NormalLaw {
  double variance = 0.0;
};

/// Limit law of a normalized magnitude statistic: the law of
/// scale * sqrt(S1^2 + S2^2) with (S1, S2) ~ N(0, cov) off the support,
/// a centered normal on it.
using LimitLaw = std::variant<FoldedBivariateNormal, NormalLaw>;

enum class SigmaVariant { AsPrinted, KernelDerived };

/// rho * (P(nu1,nu2) conj P(omega1,omega2) + P(nu1, 2pi-omega2) conj P(nu2, 2pi-omega1)):
/// the limit of (d/L) E[(G(p1) - EG(p1)) conj(G(p2) - EG(p2))].
Complex complex_cov_kernel(const SpectralTruth& truth, double rho, BifrequencyPoint p1,
                           BifrequencyPoint p2);

/// Real-linear functional c * G(point) + c_conj * conj(G(point)) of the estimator.
struct RealForm {
  BifrequencyPoint point;
  Complex c;
  Complex c_conj;

  static RealForm re(BifrequencyPoint p) { return {p, {0.5, 0.0}, {0.5, 0.0}}; }
  static RealForm im(BifrequencyPoint p) { return {p, {0.0, -0.5}, {0.0, 0.5}}; }
};

/// Asymptotic covariance of two real forms, via the kernel and
/// conj(G(nu, omega)) = G(2pi - nu, 2pi - omega).
double real_form_covariance(const SpectralTruth& truth, double rho, const RealForm& a, const RealForm& b);

/// Covariance of sqrt(n/L) (Re G, Im G) at p.
/// KernelDerived carries rho; AsPrinted evaluates the closed-form display
/// without rho, including its degree-4 off-diagonal term, for comparison.
Cov2 sigma_matrix(const SpectralTruth& truth, double rho, BifrequencyPoint p,
                  SigmaVariant variant = SigmaVariant::KernelDerived);

/// Covariance of sqrt(n/L) (Re G(nu,omega), Re G(nu,nu), Re G(omega,omega), Im G(nu,omega)).
Cov4 psi_matrix(const SpectralTruth& truth, double rho, BifrequencyPoint p);

/// Gradient of |z| at P: (Re P, Im P) / |P|.
std::array<double, 2> d1_gradient(Complex p);

/// Gradient of sqrt(x^2 + t^2) / sqrt(y z) at (Re P, g0nu, g0om, Im P).
std::array<double, 4> d2_gradient(Complex p, double g0nu, double g0om);

LimitLaw limit_law_P(const SpectralTruth& truth, double rho, BifrequencyPoint p);

/// Requires nu != omega and g0 > 0 at both frequencies.
LimitLaw limit_law_gamma(const SpectralTruth& truth, double rho, BifrequencyPoint p);

/// m i.i.d. draws. Covariances may be negative down to -1e-12 (clipped to 0).
std::vector<double> sample_limit_law(const LimitLaw& law, Rng& rng, std::size_t m);

/// Survival function of chi-square with two degrees of freedom: exp(-x/2).
double chi2_2_sf(double x);

/// x with chi2_2_sf(x) = alpha, i.e. 2 ln(1/alpha).
double chi2_2_critical(double alpha);

}  // namespace apc
