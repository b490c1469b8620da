#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <variant>

#include "apc/asymptotics.hpp"
#include "apc/models.hpp"
#include "testkit.hpp"

using namespace apc;

namespace {

SpectralTruth white_truth() { return spectral_truth(PeriodicMAModel::white_noise()); }

double one_sample_ks_rayleigh(std::vector<double> v, double s) {
  std::sort(v.begin(), v.end());
  const double m = static_cast<double>(v.size());
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = testkit::rayleigh_cdf(v[i], s);
    best = std::max({best, std::abs(f - i / m), std::abs(f - (i + 1) / m)});
  }
  return best;
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("complex_cov_kernel examples") {
  const auto w = white_truth();
  const BifrequencyPoint p(kPi / 2.0, kPi / 2.0);
  const Complex k = complex_cov_kernel(w, 2.0, p, p);
  CHECK(k.real() == doctest::Approx(1.0 / (2.0 * kPi * kPi)).epsilon(1e-14));
  CHECK(k.imag() == 0.0);
  CHECK(std::abs(complex_cov_kernel(SpectralTruth::zero(), 2.0, p, {1.0, 2.0})) == 0.0);
}

TEST_CASE("kernel symmetry") {
  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  for (int a = 1; a <= 8; ++a) {
    for (int b = 1; b <= 8; ++b) {
      const BifrequencyPoint p1(kTwoPi * a / 8.0, kTwoPi * b / 8.0);
      const BifrequencyPoint p2(kTwoPi * b / 8.0, kTwoPi * ((a + b) % 8 + 1) / 8.0);
      const Complex k12 = complex_cov_kernel(truth, 2.0, p1, p2);
      const Complex k21 = complex_cov_kernel(truth, 2.0, p2, p1);
      CHECK(std::abs(k12 - std::conj(k21)) <= 1e-12 * (1.0 + std::abs(k12)));
    }
  }
}

TEST_CASE("sigma_matrix examples") {
  const auto w = white_truth();
  const Cov2 s = sigma_matrix(w, 2.0, {kPi / 2.0, kPi / 3.0});
  CHECK(s.s11 == doctest::Approx(1.0 / (4.0 * kPi * kPi)).epsilon(1e-14));
  CHECK(s.s22 == doctest::Approx(1.0 / (4.0 * kPi * kPi)).epsilon(1e-14));
  CHECK(std::abs(s.s12) < 1e-18);
  const Cov2 z = sigma_matrix(SpectralTruth::zero(), 2.0, {1.0, 2.0});
  CHECK(z.s11 == 0.0);
  CHECK(z.s12 == 0.0);
  CHECK(z.s22 == 0.0);
  const Cov2 zp = sigma_matrix(SpectralTruth::zero(), 2.0, {1.0, 2.0}, SigmaVariant::AsPrinted);
  CHECK(zp.s11 == 0.0);
  CHECK(zp.s22 == 0.0);
}

TEST_CASE("printed and derived sigma agree up to rho where the degree-4 term vanishes") {
  // Off the support P(p) = 0, so the printed off-diagonal term drops out and
  // the printed display is the derived matrix with rho = 1.
  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  for (int s = 1; s <= 12; ++s) {
    for (int t = 1; t <= 12; ++t) {
      const BifrequencyPoint p(kTwoPi * s / 12.0, kTwoPi * t / 12.0 + 0.1);
      const Cov2 d = sigma_matrix(truth, 1.0, p);
      const Cov2 a = sigma_matrix(truth, 1.0, p, SigmaVariant::AsPrinted);
      CHECK(a.s11 == doctest::Approx(d.s11).epsilon(1e-12));
      CHECK(a.s22 == doctest::Approx(d.s22).epsilon(1e-12));
    }
  }
}

TEST_CASE("derived sigma is positive semidefinite on the grid") {
  for (const auto& model : {PeriodicMAModel::pma1(4), PeriodicMAModel::pma1(12), PeriodicMAModel::ma2()}) {
    const auto truth = spectral_truth(model);
    for (int s = 1; s <= 60; ++s) {
      for (int t = 1; t <= 60; ++t) {
        const Cov2 c = sigma_matrix(truth, 2.0, {kTwoPi * s / 60.0, kTwoPi * t / 60.0});
        CHECK(c.eigenvalues()[0] >= -1e-12);
        CHECK(c.s11 >= -1e-12);
        CHECK(c.s22 >= -1e-12);
      }
    }
  }
}

TEST_CASE("psi_matrix examples and structure") {
  const auto w = white_truth();
  const BifrequencyPoint p(kPi / 2.0, kPi / 3.0);
  const Cov4 psi = psi_matrix(w, 2.0, p);
  CHECK(psi(1, 1) == doctest::Approx(2.0 / (4.0 * kPi * kPi)).epsilon(1e-14));
  CHECK(psi(0, 1) == psi(1, 0));

  const Cov4 zero = psi_matrix(SpectralTruth::zero(), 2.0, p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(zero(i, j) == 0.0);

  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  for (const BifrequencyPoint q : {BifrequencyPoint(kPi, kPi / 2.0), BifrequencyPoint(1.0, 1.0 - kPi),
                                   BifrequencyPoint(1.3, 4.1)}) {
    const Cov4 m = psi_matrix(truth, 2.0, q);
    const Cov2 s = sigma_matrix(truth, 2.0, q);
    CHECK(m(0, 0) == doctest::Approx(s.s11).epsilon(1e-13));
    CHECK(m(3, 3) == doctest::Approx(s.s22).epsilon(1e-13));
    CHECK(m(3, 0) == doctest::Approx(s.s12).epsilon(1e-13));
    CHECK(m.eigenvalues()[0] >= -1e-10);
  }
}

TEST_CASE("psi on the diagonal has rank at most 3") {
  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  for (double nu : {0.5, 1.0, kPi / 2.0, 2.5, 4.0}) {
    const Cov4 psi = psi_matrix(truth, 2.0, {nu, nu});
    CHECK(psi.rank() <= 3);
  }
}

TEST_CASE("d1_gradient") {
  const auto a = d1_gradient({1.0, 0.0});
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 0.0);
  const auto b = d1_gradient({3.0, 4.0});
  CHECK(b[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(d1_gradient({0.0, 0.0}), InvalidArgument);
  // with Sigma = I the delta-method variance is |d1|^2 = 1
  CHECK(b[0] * b[0] + b[1] * b[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("d2_gradient") {
  const auto a = d2_gradient({1.0, 0.0}, 1.0, 1.0);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == -0.5);
  CHECK(a[2] == -0.5);
  CHECK(a[3] == 0.0);
  const auto b = d2_gradient({0.0, 1.0}, 1.0, 1.0);
  CHECK(b[0] == 0.0);
  CHECK(b[1] == -0.5);
  CHECK(b[2] == -0.5);
  CHECK(b[3] == 1.0);
  const auto c = d2_gradient({1.0, 0.0}, 4.0, 4.0);
  CHECK(c[0] == doctest::Approx(a[0] / 4.0));
  CHECK(c[1] / c[0] == doctest::Approx(0.25 * a[1] / a[0]));
  CHECK(c[2] / c[0] == doctest::Approx(0.25 * a[2] / a[0]));
  // with Psi = I the variance is the squared norm of the gradient
  CHECK(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3] == doctest::Approx(1.5));
  CHECK_THROWS_AS(d2_gradient({0.0, 0.0}, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(d2_gradient({1.0, 0.0}, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(d2_gradient({1.0, 0.0}, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("limit_law_P") {
  const auto w = white_truth();
  const LimitLaw off = limit_law_P(w, 2.0, {kPi / 2.0, kPi / 3.0});
  REQUIRE(std::holds_alternative<FoldedBivariateNormal>(off));
  const auto& f = std::get<FoldedBivariateNormal>(off);
  CHECK(f.scale == 1.0);
  CHECK(f.cov.s11 == doctest::Approx(1.0 / (4.0 * kPi * kPi)));

  const LimitLaw zero = limit_law_P(SpectralTruth::zero(), 2.0, {1.0, 2.0});
  REQUIRE(std::holds_alternative<FoldedBivariateNormal>(zero));
  Rng rng(1);
  for (double v : sample_limit_law(zero, rng, 100)) CHECK(v == 0.0);

  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  const BifrequencyPoint on(kPi, kPi / 2.0);
  const LimitLaw law = limit_law_P(truth, 2.0, on);
  REQUIRE(std::holds_alternative<NormalLaw>(law));
  const Cov2 s = sigma_matrix(truth, 2.0, on);
  const auto d = d1_gradient(truth(on));
  CHECK(std::get<NormalLaw>(law).variance ==
        doctest::Approx(d[0] * d[0] * s.s11 + 2 * d[0] * d[1] * s.s12 + d[1] * d[1] * s.s22));
}

TEST_CASE("limit_law_gamma") {
  const auto w = white_truth();
  const LimitLaw off = limit_law_gamma(w, 2.0, {kPi / 2.0, kPi / 3.0});
  REQUIRE(std::holds_alternative<FoldedBivariateNormal>(off));
  CHECK(std::get<FoldedBivariateNormal>(off).scale == doctest::Approx(kTwoPi).epsilon(1e-14));
  CHECK_THROWS_AS(limit_law_gamma(w, 2.0, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(limit_law_gamma(SpectralTruth::zero(), 2.0, {1.0, 2.0}), InvalidArgument);

  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  const LimitLaw on = limit_law_gamma(truth, 2.0, {kPi, kPi / 2.0});
  REQUIRE(std::holds_alternative<NormalLaw>(on));
  CHECK(std::get<NormalLaw>(on).variance > 0.0);
}

TEST_CASE("sample_limit_law") {
  Rng a(5);
  for (double v : sample_limit_law(NormalLaw{0.0}, a, 50)) CHECK(v == 0.0);

  Rng r1(123);
  Rng r2(123);
  const LimitLaw law = FoldedBivariateNormal{{1.0, 0.0, 1.0}, 1.0};
  const auto s1 = sample_limit_law(law, r1, 1000);
  const auto s2 = sample_limit_law(law, r2, 1000);
  CHECK(s1 == s2);

  Rng big(99);
  const auto draws = sample_limit_law(law, big, 1000000);
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= static_cast<double>(draws.size());
  CHECK(std::abs(mean - std::sqrt(kPi / 2.0)) <= 0.01);

  Rng c(6);
  CHECK_THROWS_AS(sample_limit_law(FoldedBivariateNormal{{1.0, 2.0, 1.0}, 1.0}, c, 10), InvalidArgument);
  CHECK_NOTHROW(sample_limit_law(FoldedBivariateNormal{{-1e-13, 0.0, 1.0}, 1.0}, c, 10));
  CHECK_THROWS_AS(sample_limit_law(law, c, 0), InvalidArgument);
}

TEST_CASE("white noise limit law is Rayleigh") {
  const auto law = limit_law_P(white_truth(), 2.0, {kPi / 2.0, kPi / 3.0});
  Rng rng(2718);
  const auto draws = sample_limit_law(law, rng, 1000000);
  CHECK(one_sample_ks_rayleigh(draws, 1.0 / kTwoPi) < 0.01);
}

TEST_CASE("chi-square(2) reference") {
  CHECK(chi2_2_sf(0.0) == 1.0);
  CHECK(chi2_2_sf(2.0 * std::log(100.0)) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(chi2_2_sf(2.0 * std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(chi2_2_sf(-1.0), InvalidArgument);
  CHECK(chi2_2_critical(0.01) == doctest::Approx(9.2103403719761836).epsilon(1e-14));
  for (double a : {0.001, 0.01, 0.05, 0.5}) CHECK(chi2_2_sf(chi2_2_critical(a)) == doctest::Approx(a).epsilon(1e-14));
  CHECK_THROWS_AS(chi2_2_critical(0.0), InvalidArgument);
}

TEST_CASE("kernel matches Monte Carlo covariance for PMA(1) T=4") {
  // Trapezoid window: its discrete weights reach rho quickly in L, unlike the
  // truncated window whose finite-L factor is (2L+1)/L.
  const auto model = PeriodicMAModel::pma1(4);
  const auto truth = spectral_truth(model);
  const auto w = LagWindowSpec::trapezoid(0.5);
  const BifrequencyPoint p(kPi, kPi / 2.0);
  const auto mc = testkit::mc_covariance(model, 16000, 16, p, p, 500, 31337, w);
  const Complex k = complex_cov_kernel(truth, w.rho(), p, p);
  CHECK(std::abs(mc.cov - k) <= 0.10 * std::abs(k));

  const Cov2 s = sigma_matrix(truth, w.rho(), p);
  CHECK(std::abs(mc.var_re - s.s11) <= 0.10 * s.s11);
  CHECK(std::abs(mc.var_im - s.s22) <= 0.10 * s.s22);
}

TEST_CASE("exact finite-sample covariance approaches sigma as L grows") {
  const auto model = PeriodicMAModel::pma1(4);
  const auto truth = spectral_truth(model);
  const auto w = LagWindowSpec::truncated();
  for (const BifrequencyPoint p : {BifrequencyPoint(kPi, kPi / 2.0), BifrequencyPoint(2.0, 2.0 - kPi / 2.0)}) {
    const Cov2 s = sigma_matrix(truth, w.rho(), p);
    const auto e = testkit::exact_covariance(model, 128000, w, 120, p);
    CHECK(std::abs(e.var_re - s.s11) <= 0.03 * s.s11);
    CHECK(std::abs(e.var_im - s.s22) <= 0.03 * s.s22);
    CHECK(std::abs(e.cov_re_im - s.s12) <= 0.03 * std::sqrt(s.s11 * s.s22));
  }
}

}
