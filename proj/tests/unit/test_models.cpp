#include <doctest.h>

#include <cmath>
#include <vector>

#include "apc/models.hpp"

using namespace apc;

namespace {

double theta_pma1(int t, int T) {
  const double s = 2.0 + std::sin(kTwoPi * t / T);
  return s * s;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("simulate basics") {
  const auto silent = PeriodicMAModel(4, {{1, {1.0, 2.0, 3.0, 4.0}}}, 0.0);
  const TimeSeries z = simulate(silent, 50, 1);
  CHECK(z.size() == 50);
  CHECK(z.start_index() == 0);
  for (double v : z.samples()) CHECK(v == 0.0);

  const auto m = PeriodicMAModel::pma1(4);
  const TimeSeries a = simulate(m, 300, 42);
  const TimeSeries b = simulate(m, 300, 42);
  const TimeSeries c = simulate(m, 300, 43);
  bool same = true;
  bool differs = false;
  for (std::size_t i = 0; i < 300; ++i) {
    same = same && a[i] == b[i];
    differs = differs || a[i] != c[i];
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("PMA(1) T=4 periodic variance") {
  const TimeSeries x = simulate(PeriodicMAModel::pma1(4), 100000, 5);
  double ss = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.absolute_index(i) % 4 == 2) {
      ss += x[i] * x[i];
      ++count;
    }
  }
  CHECK(std::abs(ss / count - 82.0) <= 0.03 * 82.0);
}

TEST_CASE("autocovariance examples") {
  const auto m = PeriodicMAModel::pma1(4);
  CHECK(autocovariance(m, 0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(autocovariance(m, 8, 0) == doctest::Approx(2.0).epsilon(1e-14));
  for (std::int64_t t = -5; t < 9; ++t) {
    const double th_t = theta_pma1(static_cast<int>(((t % 4) + 4) % 4), 4);
    const double th_tm1 = theta_pma1(static_cast<int>((((t - 1) % 4) + 4) % 4), 4);
    CHECK(autocovariance(m, t, 0) == doctest::Approx(th_tm1 * th_tm1 + 1.0));
    CHECK(autocovariance(m, t, 1) == doctest::Approx(th_t));
    CHECK(autocovariance(m, t, -1) == doctest::Approx(th_tm1));
    CHECK(autocovariance(m, t, 2) == 0.0);
    CHECK(autocovariance(m, t, -7) == 0.0);
  }
  const auto ma2 = PeriodicMAModel::ma2();
  for (std::int64_t t = 0; t < 3; ++t) {
    CHECK(autocovariance(ma2, t, 0) == doctest::Approx(6.0));
    CHECK(autocovariance(ma2, t, 1) == doctest::Approx(3.0));
    CHECK(autocovariance(ma2, t, 2) == doctest::Approx(2.0));
    CHECK(autocovariance(ma2, t, 3) == 0.0);
  }
  const auto scaled = PeriodicMAModel(1, {{1, {0.5}}}, 2.0);
  CHECK(autocovariance(scaled, 3, 0) == doctest::Approx(4.0 * 1.25));
}

TEST_CASE("autocovariance is symmetric: B(t, tau) = B(t + tau, -tau)") {
  const auto m = PeriodicMAModel(5, {{1, {1, -2, 0.5, 3, 1}}, {3, {0.1, 0.2, -0.3, 0.4, 2}}}, 1.3);
  for (std::int64_t t = -6; t < 11; ++t) {
    for (std::int64_t tau = -5; tau <= 5; ++tau) {
      CHECK(autocovariance(m, t, tau) == doctest::Approx(autocovariance(m, t + tau, -tau)).epsilon(1e-13));
    }
  }
}

TEST_CASE("sample autocovariance matches the exact one") {
  const auto m = PeriodicMAModel::pma1(4);
  const std::size_t n = 100000;
  const TimeSeries x = simulate(m, n, 77);
  for (int phase = 0; phase < 4; ++phase) {
    for (int tau = 0; tau <= 2; ++tau) {
      std::vector<double> prods;
      for (std::size_t i = 0; i + tau < n; ++i) {
        if (((x.absolute_index(i) % 4) + 4) % 4 == phase) prods.push_back(x[i] * x[i + tau]);
      }
      double mean = 0.0;
      for (double v : prods) mean += v;
      mean /= prods.size();
      double var = 0.0;
      for (double v : prods) var += (v - mean) * (v - mean);
      // lag-1 dependence between terms is ignored in the standard error; the
      // terms are spaced T = 4 apart, beyond the MA(1) range.
      const double se = std::sqrt(var / (prods.size() - 1) / prods.size());
      CHECK(std::abs(mean - autocovariance(m, phase, tau)) <= 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("fourier coefficient examples") {
  const auto m = PeriodicMAModel::pma1(4);
  CHECK(fourier_coefficient(m, 0, 0).real() == doctest::Approx(29.5).epsilon(1e-14));
  CHECK(std::abs(fourier_coefficient(m, 0, 0).imag()) < 1e-12);
  CHECK(fourier_coefficient(m, 2, 0).real() == doctest::Approx(12.5).epsilon(1e-14));
  CHECK(std::abs(fourier_coefficient(m, 2, 0).imag()) < 1e-12);
  CHECK(fourier_coefficient(m, 0, 1).real() == doctest::Approx(4.5).epsilon(1e-14));
  CHECK(std::abs(fourier_coefficient(m, 1, 5)) == 0.0);
}

TEST_CASE("spectral truth examples for PMA(1) T=4") {
  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  CHECK(truth.g0(Frequency(kTwoPi)) == doctest::Approx(77.0 / (4.0 * kPi)).epsilon(1e-12));
  CHECK(std::abs(truth({kPi / 2.0, kPi / 2.0 - kPi})) == doctest::Approx(std::sqrt(629.0) / (4.0 * kPi)).epsilon(1e-12));
  CHECK(std::abs(truth({kPi / 2.0, kPi / 3.0})) == 0.0);
}

TEST_CASE("PMA(1) T=4 closed forms on the 120-point grid") {
  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  for (int k = 1; k <= 120; ++k) {
    const double nu = kTwoPi * k / 120.0;
    const double g0 = (59.0 + 18.0 * std::cos(nu)) / (4.0 * kPi);
    const double gpi = std::sqrt(625.0 + 4.0 * std::sin(nu) * std::sin(nu)) / (4.0 * kPi);
    const double minus =
        std::sqrt(2.0) * std::sqrt(51.0 + 10.0 * std::cos(nu) - 10.0 * std::sin(nu) - std::sin(2.0 * nu)) / kPi;
    const double plus =
        std::sqrt(2.0) * std::sqrt(51.0 + 10.0 * std::cos(nu) + 10.0 * std::sin(nu) + std::sin(2.0 * nu)) / kPi;
    CHECK(std::abs(truth({nu, nu})) == doctest::Approx(g0).epsilon(1e-9));
    CHECK(std::abs(truth({nu, nu - kPi})) == doctest::Approx(gpi).epsilon(1e-9));
    // With e^{-i nu s} in the estimator the +sin form belongs to the line
    // omega = nu - pi/2 and the -sin form to omega = nu - 3pi/2.
    CHECK(std::abs(truth({nu, nu - kPi / 2.0})) == doctest::Approx(plus).epsilon(1e-9));
    CHECK(std::abs(truth({nu, nu - 1.5 * kPi})) == doctest::Approx(minus).epsilon(1e-9));
  }
}

TEST_CASE("PMA(1) T=12 densities") {
  const auto truth = spectral_truth(PeriodicMAModel::pma1(12));
  double max_pi6 = 0.0;
  double max_pi3 = 0.0;
  for (int k = 1; k <= 120; ++k) {
    const double nu = kTwoPi * k / 120.0;
    CHECK(truth.g0(Frequency(nu)) == doctest::Approx((235.0 + 72.0 * std::cos(nu)) / (16.0 * kPi)).epsilon(1e-9));
    CHECK(std::abs(truth({nu, nu - kPi / 2.0})) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-9));
    CHECK(std::abs(truth({nu, nu - 2.0 * kPi / 3.0})) == doctest::Approx(1.0 / (32.0 * kPi)).epsilon(1e-9));
    CHECK(std::abs(truth({nu, nu - 5.0 * kPi / 6.0})) < 1e-12);
    CHECK(std::abs(truth({nu, nu - kPi})) < 1e-12);
    max_pi6 = std::max(max_pi6, std::abs(truth({nu, nu - kPi / 6.0})));
    max_pi3 = std::max(max_pi3, std::abs(truth({nu, nu - kPi / 3.0})));
  }
  CHECK(max_pi6 > 0.1);
  CHECK(max_pi3 > 0.1);
}

TEST_CASE("truth conjugation and stationary specialization") {
  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  for (int s = 1; s <= 24; ++s) {
    for (int t = 1; t <= 24; ++t) {
      const BifrequencyPoint p(kTwoPi * s / 24.0, kTwoPi * t / 24.0);
      const Complex a = truth(p);
      const Complex b = truth(p.conjugate());
      CHECK(std::abs(b - std::conj(a)) <= 1e-12 * (1.0 + std::abs(a)));
      if (p.is_diagonal()) CHECK(a.imag() == 0.0);
    }
  }
  const auto white = spectral_truth(PeriodicMAModel::white_noise(2.0));
  CHECK(white.g0(Frequency(1.0)) == doctest::Approx(4.0 / kTwoPi));
  CHECK(white.g0(Frequency(4.0)) == doctest::Approx(4.0 / kTwoPi));
  CHECK(std::abs(white({1.0, 2.0})) == 0.0);
  const auto ma2 = spectral_truth(PeriodicMAModel::ma2());
  CHECK(std::abs(ma2({1.0, 1.5})) == 0.0);
  // |1 + e^{-i nu} + 2 e^{-2 i nu}|^2 / 2pi
  const double nu = 0.8;
  const Complex h = 1.0 + std::polar(1.0, -nu) + 2.0 * std::polar(1.0, -2.0 * nu);
  CHECK(ma2.g0(Frequency(nu)) == doctest::Approx(std::norm(h) / kTwoPi).epsilon(1e-12));
}

TEST_CASE("model parsing") {
  CHECK(PeriodicMAModel::parse("pma1:T=4").period() == 4);
  CHECK(PeriodicMAModel::parse("pma1:T=4").description() == "pma1:T=4");
  CHECK(PeriodicMAModel::parse("ma2").max_lag() == 2);
  CHECK(PeriodicMAModel::parse("white").max_lag() == 0);
  CHECK(PeriodicMAModel::parse("white;sd=2").innovation_sd() == 2.0);
  const auto m = PeriodicMAModel::parse("pma:T=2;q=2;coeffs=1,2,3,4");
  CHECK(m.period() == 2);
  CHECK(m.theta(1, 0) == 1.0);
  CHECK(m.theta(1, 1) == 2.0);
  CHECK(m.theta(2, 0) == 3.0);
  CHECK(m.theta(2, 3) == 4.0);
  CHECK(m.theta(2, -1) == 4.0);
  const auto round = PeriodicMAModel::parse(m.description());
  CHECK(round.coeffs() == m.coeffs());
  CHECK_THROWS_AS(PeriodicMAModel::parse("arma"), InvalidArgument);
  CHECK_THROWS_AS(PeriodicMAModel::parse("pma:T=2;q=2;coeffs=1,2,3"), InvalidArgument);
  CHECK_THROWS_AS(PeriodicMAModel::parse("pma1:T=x"), InvalidArgument);
  CHECK_THROWS_AS(PeriodicMAModel::parse("pma1:T=0"), InvalidArgument);
  CHECK_THROWS_AS(PeriodicMAModel(2, {{0, {1.0, 1.0}}}), InvalidArgument);
  CHECK_THROWS_AS(PeriodicMAModel(2, {{1, {1.0}}}), InvalidArgument);
  CHECK_THROWS_AS(PeriodicMAModel::white_noise(-1.0), InvalidArgument);
}

}
