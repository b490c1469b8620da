#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apc/core.hpp"
#include "apc/subsampling.hpp"
#include "apc/windows.hpp"

namespace apc {

enum class TestMethod { SubsP, SubsGamma, Chi2P };
enum class TestStatus { Ok, Undetermined };

/// Block statistics behind the subsampling critical values, with tau_b =
/// sqrt(b/L_b) and G standing for the estimate or the complex coherence:
///   Difference  tau_b |G_b - G_n|
///   Magnitude   tau_b (|G_b| - |G_n|), the confidence-interval distribution
///   None        tau_b |G_b|
enum class Centering { Difference, Magnitude, None };

/// `subs-p`, `subs-gamma`, `chi2`.
TestMethod parse_test_method(std::string_view text);
const char* to_string(TestMethod method) noexcept;
const char* to_string(TestStatus status) noexcept;
/// `difference`, `magnitude`, `none`.
Centering parse_centering(std::string_view text);
const char* to_string(Centering centering) noexcept;

struct TestOutcome {
  BifrequencyPoint point;
  double statistic = 0.0;
  double critical = 0.0;
  bool reject = false;
  TestMethod method = TestMethod::SubsP;
  TestStatus status = TestStatus::Ok;
  std::string note;  // reason when undetermined
};

/// Tests of H0: P(nu, omega) = 0 on one series. Full-sample estimates and
/// per-frequency block diagonals are cached, so one tester can serve a whole
/// grid from several threads.
class PeriodicityTester {
 public:
  PeriodicityTester(TimeSeries x, LagWindowSpec w, SubsamplingParams params,
                    Centering centering = Centering::Difference);

  const TimeSeries& series() const noexcept { return x_; }
  const SubsamplingParams& params() const noexcept { return params_; }
  const LagWindowSpec& window() const noexcept { return w_; }
  Centering centering() const noexcept { return centering_; }

  /// Full-sample G_n at p with bandwidth L_n.
  Complex full_estimate(BifrequencyPoint p) const;

  /// sqrt(n/L_n) |G_n| against the (1 - alpha) subsampling quantile.
  TestOutcome test_P_subsampling(BifrequencyPoint p) const;
  /// sqrt(n/L_n) |gamma_n| against the (1 - alpha) subsampling quantile. nu != omega.
  TestOutcome test_gamma_subsampling(BifrequencyPoint p) const;
  /// (n/L_n)((Re G/sigma_R)^2 + (Im G/sigma_I)^2) against 2 ln(1/alpha), with the
  /// variances taken from the kernel-derived covariance under a plug-in truth
  /// that is zero at p and its conjugate point.
  TestOutcome test_P_chi2(BifrequencyPoint p) const;

  TestOutcome test(TestMethod method, BifrequencyPoint p) const;

 private:
  std::shared_ptr<const std::vector<double>> block_diagonal(Frequency f) const;

  TimeSeries x_;
  LagWindowSpec w_;
  SubsamplingParams params_;
  Centering centering_;
  double normalizer_;

  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, Complex> full_cache_;
  mutable std::map<double, std::shared_ptr<const std::vector<double>>> diag_cache_;
};

TestOutcome test_P_subsampling(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                               BifrequencyPoint p, Centering centering = Centering::Difference);
TestOutcome test_gamma_subsampling(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                                   BifrequencyPoint p, Centering centering = Centering::Difference);
TestOutcome test_P_chi2(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                        BifrequencyPoint p);

struct ScanCell {
  int s = 0;
  int t = 0;
  TestOutcome outcome;
};

struct ScanResult {
  int grid_size = 0;
  TestMethod method = TestMethod::SubsP;
  Centering centering = Centering::Difference;
  SubsamplingParams params;
  std::vector<ScanCell> outcomes;  // row-major in (s, t), diagonal skipped
};

/// Grid frequency 2 pi k / g for k = 1..g (k = g gives exactly 2 pi).
Frequency grid_frequency(int k, int grid_size);

/// Runs `method` at every (2 pi s/g, 2 pi t/g), 1 <= s, t <= g, s != t.
/// Per-point failures are recorded as undetermined; output order is fixed.
ScanResult scan(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params, int grid_size,
                TestMethod method, unsigned threads = 1, Centering centering = Centering::Difference);

}  // namespace apc
