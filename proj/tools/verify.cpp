#include <cmath>
#include <ostream>
#include <vector>

#include "apc/asymptotics.hpp"
#include "apc/estimators.hpp"
#include "apc/models.hpp"
#include "apc/random.hpp"
#include "cli.hpp"
#include "testkit.hpp"

namespace apc::cli {

int run_verify(std::ostream& out) {
  std::vector<testkit::OracleReport> reports;

  const auto truth = spectral_truth(PeriodicMAModel::pma1(4));
  double worst_truth = 0.0;
  for (int k = 1; k <= 120; ++k) {
    const double nu = kTwoPi * k / 120.0;
    const double g0 = (59.0 + 18.0 * std::cos(nu)) / (4.0 * kPi);
    const double gpi = std::sqrt(625.0 + 4.0 * std::sin(nu) * std::sin(nu)) / (4.0 * kPi);
    worst_truth = std::max(worst_truth, std::abs(std::abs(truth({nu, nu})) - g0) / g0);
    worst_truth = std::max(worst_truth, std::abs(std::abs(truth({nu, nu - kPi})) - gpi) / gpi);
  }
  reports.push_back(testkit::report("truth max rel error (lambda 0, pi)", 0.0, worst_truth, 1e-9));

  Rng rng(20240101);
  double worst_sum = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 63);
    const int L = 1 + static_cast<int>(rng.uniform() * static_cast<double>(n - 1));
    std::vector<double> v(n);
    for (double& s : v) s = rng.normal();
    const TimeSeries x(static_cast<std::int64_t>(rng.uniform() * 50), v);
    const BifrequencyPoint p(rng.uniform() * kTwoPi, rng.uniform() * kTwoPi);
    const Complex oracle = testkit::brute_force_G(x, LagWindowSpec::truncated(), L, p);
    const Complex lag = smoothed_bispectral(x, LagWindowSpec::truncated(), L, p).value;
    worst_sum = std::max(worst_sum, std::abs(lag - oracle) / (1.0 + std::abs(oracle)));
  }
  reports.push_back(testkit::report("lag sum vs double sum max rel error", 0.0, worst_sum, 1e-10));

  const auto w = LagWindowSpec::trapezoid(0.5);
  const BifrequencyPoint p(kPi, kPi / 2.0);
  const auto mc = testkit::mc_covariance(PeriodicMAModel::pma1(4), 4000, 12, p, p, 200, 99, w);
  const Cov2 s = sigma_matrix(truth, w.rho(), p);
  reports.push_back(testkit::report("Var Re G at (pi, pi/2)", s.s11, mc.var_re,
                                    std::max(0.15 * s.s11, 3.0 * mc.se_var_re)));
  reports.push_back(testkit::report("Var Im G at (pi, pi/2)", s.s22, mc.var_im,
                                    std::max(0.15 * s.s22, 3.0 * mc.se_var_im)));

  bool ok = true;
  for (const auto& r : reports) {
    out << r.describe() << "\n";
    ok = ok && r.pass;
  }
  out << (ok ? "verify: all oracles pass" : "verify: FAILURES") << "\n";
  return ok ? kOk : kFailure;
}

}  // namespace apc::cli
