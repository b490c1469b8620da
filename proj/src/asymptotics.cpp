#include "apc/asymptotics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace apc {

namespace {

constexpr double kPsdTolerance = 1e-12;

// Symmetric square root of a 2x2 covariance, with eigenvalues in
// [-kPsdTolerance, 0) clipped to zero.
Eigen::Matrix2d symmetric_sqrt(const Cov2& cov) {
  Eigen::Matrix2d m;
  m << cov.s11, cov.s12, cov.s12, cov.s22;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m);
  Eigen::Vector2d values = solver.eigenvalues();
  for (int i = 0; i < 2; ++i) {
    if (values(i) < -kPsdTolerance) throw InvalidArgument("covariance matrix is not positive semidefinite");
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

SpectralTruth SpectralTruth::zero() {
  return SpectralTruth{[](BifrequencyPoint) { return Complex{0.0, 0.0}; }};
}

std::array<double, 2> Cov2::eigenvalues() const {
  Eigen::Matrix2d m;
  m << s11, s12, s12, s22;
  const Eigen::Vector2d v = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m, Eigen::EigenvaluesOnly).eigenvalues();
  return {v(0), v(1)};
}

int Cov4::index(int i, int j) {
  if (i < j) std::swap(i, j);
  if (i < 0 || i > 3 || j < 0) throw InvalidArgument("Cov4 index out of range");
  return i * (i + 1) / 2 + j;
}

double Cov4::operator()(int i, int j) const { return lower_[static_cast<std::size_t>(index(i, j))]; }

void Cov4::set(int i, int j, double v) { lower_[static_cast<std::size_t>(index(i, j))] = v; }

std::array<double, 4> Cov4::eigenvalues() const {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = (*this)(i, j);
  const Eigen::Vector4d v = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(m, Eigen::EigenvaluesOnly).eigenvalues();
  return {v(0), v(1), v(2), v(3)};
}

int Cov4::rank(double tol) const {
  const auto ev = eigenvalues();
  double largest = 0.0;
  for (double e : ev) largest = std::max(largest, std::abs(e));
  if (largest == 0.0) return 0;
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [&](double e) { return e > tol * largest; }));
}

Complex complex_cov_kernel(const SpectralTruth& truth, double rho, BifrequencyPoint p1,
                           BifrequencyPoint p2) {
  const Complex first = truth({p1.nu, p2.nu}) * std::conj(truth({p1.omega, p2.omega}));
  const Complex second = truth({p1.nu, p2.omega.reflect()}) * std::conj(truth({p2.nu, p1.omega.reflect()}));
  return rho * (first + second);
}

double real_form_covariance(const SpectralTruth& truth, double rho, const RealForm& a, const RealForm& b) {
  const BifrequencyPoint a_bar = a.point.conjugate();
  const BifrequencyPoint b_bar = b.point.conjugate();
  const Complex total = a.c * std::conj(b.c) * complex_cov_kernel(truth, rho, a.point, b.point) +
                        a.c * std::conj(b.c_conj) * complex_cov_kernel(truth, rho, a.point, b_bar) +
                        a.c_conj * std::conj(b.c) * complex_cov_kernel(truth, rho, a_bar, b.point) +
                        a.c_conj * std::conj(b.c_conj) * complex_cov_kernel(truth, rho, a_bar, b_bar);
  return total.real();
}

Cov2 sigma_matrix(const SpectralTruth& truth, double rho, BifrequencyPoint p, SigmaVariant variant) {
  if (variant == SigmaVariant::KernelDerived) {
    const RealForm re = RealForm::re(p);
    const RealForm im = RealForm::im(p);
    return Cov2{real_form_covariance(truth, rho, re, re), real_form_covariance(truth, rho, re, im),
                real_form_covariance(truth, rho, im, im)};
  }
  const Frequency nu = p.nu;
  const Frequency omega = p.omega;
  const double g0g0 = truth.g0(nu) * truth.g0(omega);
  const double cross = std::norm(truth({nu, omega.reflect()}));
  const Complex anti = truth({nu, nu.reflect()}) * truth({omega.reflect(), omega});
  const Complex pv = truth(p);
  const double re2 = pv.real() * pv.real();
  const double im2 = pv.imag() * pv.imag();
  return Cov2{0.5 * (g0g0 + cross + anti.real() + re2 - im2), -re2 * im2 - 0.5 * anti.imag(),
              0.5 * (g0g0 + cross - anti.real() - re2 + im2)};
}

Cov4 psi_matrix(const SpectralTruth& truth, double rho, BifrequencyPoint p) {
  const std::array<RealForm, 4> forms = {RealForm::re(p), RealForm::re({p.nu, p.nu}),
                                         RealForm::re({p.omega, p.omega}), RealForm::im(p)};
  Cov4 psi;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) {
      psi.set(i, j, real_form_covariance(truth, rho, forms[static_cast<std::size_t>(i)],
                                         forms[static_cast<std::size_t>(j)]));
    }
  }
  return psi;
}

std::array<double, 2> d1_gradient(Complex p) {
  const double mag = std::abs(p);
  if (mag == 0.0) throw InvalidArgument("d1 gradient undefined at P = 0");
  return {p.real() / mag, p.imag() / mag};
}

std::array<double, 4> d2_gradient(Complex p, double g0nu, double g0om) {
  const double mag = std::abs(p);
  if (mag == 0.0) throw InvalidArgument("d2 gradient undefined at P = 0");
  if (!(g0nu > 0.0) || !(g0om > 0.0)) throw InvalidArgument("d2 gradient needs positive g0 values");
  const double lead = mag / std::sqrt(g0nu * g0om);
  const double mag2 = mag * mag;
  return {lead * p.real() / mag2, -lead / (2.0 * g0nu), -lead / (2.0 * g0om), lead * p.imag() / mag2};
}

LimitLaw limit_law_P(const SpectralTruth& truth, double rho, BifrequencyPoint p) {
  const Cov2 sigma = sigma_matrix(truth, rho, p);
  const Complex pv = truth(p);
  if (pv == Complex{0.0, 0.0}) return FoldedBivariateNormal{sigma, 1.0};
  const auto d = d1_gradient(pv);
  return NormalLaw{d[0] * d[0] * sigma.s11 + 2.0 * d[0] * d[1] * sigma.s12 + d[1] * d[1] * sigma.s22};
}

LimitLaw limit_law_gamma(const SpectralTruth& truth, double rho, BifrequencyPoint p) {
  if (p.is_diagonal()) throw InvalidArgument("coherence limit law requires nu != omega");
  const double g_nu = truth.g0(p.nu);
  const double g_om = truth.g0(p.omega);
  if (!(g_nu > 0.0) || !(g_om > 0.0)) throw InvalidArgument("coherence limit law requires g0 > 0");
  const Complex pv = truth(p);
  if (pv == Complex{0.0, 0.0}) {
    return FoldedBivariateNormal{sigma_matrix(truth, rho, p), 1.0 / std::sqrt(g_nu * g_om)};
  }
  const auto d = d2_gradient(pv, g_nu, g_om);
  const Cov4 psi = psi_matrix(truth, rho, p);
  double var = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) var += d[static_cast<std::size_t>(i)] * psi(i, j) * d[static_cast<std::size_t>(j)];
  return NormalLaw{var};
}

std::vector<double> sample_limit_law(const LimitLaw& law, Rng& rng, std::size_t m) {
  if (m == 0) throw InvalidArgument("sample count must be >= 1");
  std::vector<double> out(m);
  if (const auto* normal = std::get_if<NormalLaw>(&law)) {
    if (normal->variance < -kPsdTolerance) throw InvalidArgument("negative limit-law variance");
    const double sd = std::sqrt(std::max(normal->variance, 0.0));
    for (double& v : out) v = sd * rng.normal();
    return out;
  }
  const auto& folded = std::get<FoldedBivariateNormal>(law);
  if (!(folded.scale > 0.0)) throw InvalidArgument("folded normal scale must be positive");
  const Eigen::Matrix2d root = symmetric_sqrt(folded.cov);
  for (double& v : out) {
    const Eigen::Vector2d z(rng.normal(), rng.normal());
    v = folded.scale * (root * z).norm();
  }
  return out;
}

double chi2_2_sf(double x) {
  if (!(x >= 0.0)) throw InvalidArgument("chi-square argument must be nonnegative");
  return std::exp(-0.5 * x);
}

double chi2_2_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  return -2.0 * std::log(alpha);
}

}  // namespace apc
