#include "apc/detect.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "apc/asymptotics.hpp"
#include "apc/estimators.hpp"
#include "apc/parallel.hpp"

namespace apc {

namespace {

TestOutcome undetermined(TestMethod method, BifrequencyPoint p, std::string note) {
  TestOutcome out;
  out.point = p;
  out.method = method;
  out.status = TestStatus::Undetermined;
  out.note = std::move(note);
  return out;
}

TestOutcome decided(TestMethod method, BifrequencyPoint p, double statistic, double critical) {
  TestOutcome out;
  out.point = p;
  out.method = method;
  out.statistic = statistic;
  out.critical = critical;
  out.reject = statistic > critical;
  return out;
}

// sqrt(b/L_b) |v_b - center| with v_b the block estimate, or the block complex
// coherence when diagonals are given.
EmpiricalDistribution difference_distribution(const BlockEstimates& blocks, std::span<const double> diag_nu,
                                              std::span<const double> diag_om, Complex center, std::size_t b,
                                              int L_b) {
  const std::size_t m = blocks.size();
  const bool coherence = !diag_nu.empty();
  const double scale = std::sqrt(static_cast<double>(b) / L_b);
  EmpiricalDistribution dist;
  dist.b = b;
  dist.L_b = L_b;
  dist.values.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    Complex v(blocks.re[j], blocks.im[j]);
    if (coherence) {
      const double denom = std::abs(diag_nu[j] * diag_om[j]);
      if (denom == 0.0) {
        ++dist.excluded;
        continue;
      }
      v /= std::sqrt(denom);
    }
    dist.values.push_back(scale * std::abs(v - center));
  }
  if (static_cast<double>(dist.excluded) > kMaxExcludedFraction * static_cast<double>(m)) {
    throw NumericDegeneracy("too many subsampling blocks with a degenerate coherence denominator (" +
                            std::to_string(dist.excluded) + " of " + std::to_string(m) + ")");
  }
  std::sort(dist.values.begin(), dist.values.end());
  return dist;
}

}  // namespace

TestMethod parse_test_method(std::string_view text) {
  if (text == "subs-p") return TestMethod::SubsP;
  if (text == "subs-gamma") return TestMethod::SubsGamma;
  if (text == "chi2") return TestMethod::Chi2P;
  throw InvalidArgument("unknown method '" + std::string(text) + "' (expected subs-p|subs-gamma|chi2)");
}

const char* to_string(TestMethod method) noexcept {
  switch (method) {
    case TestMethod::SubsP:
      return "subs-p";
    case TestMethod::SubsGamma:
      return "subs-gamma";
    case TestMethod::Chi2P:
      return "chi2";
  }
  return "?";
}

const char* to_string(TestStatus status) noexcept {
  return status == TestStatus::Ok ? "ok" : "undetermined";
}

Centering parse_centering(std::string_view text) {
  if (text == "difference") return Centering::Difference;
  if (text == "magnitude") return Centering::Magnitude;
  if (text == "none") return Centering::None;
  throw InvalidArgument("unknown centering '" + std::string(text) + "' (expected difference|magnitude|none)");
}

const char* to_string(Centering centering) noexcept {
  switch (centering) {
    case Centering::Difference:
      return "difference";
    case Centering::Magnitude:
      return "magnitude";
    case Centering::None:
      return "none";
  }
  return "?";
}

PeriodicityTester::PeriodicityTester(TimeSeries x, LagWindowSpec w, SubsamplingParams params, Centering centering)
    : x_(std::move(x)), w_(std::move(w)), params_(params), centering_(centering) {
  params_.validate_for_subsampling(x_.size());
  normalizer_ = std::sqrt(static_cast<double>(x_.size()) / params_.L_n);
}

Complex PeriodicityTester::full_estimate(BifrequencyPoint p) const {
  const std::pair<double, double> key{p.nu.value(), p.omega.value()};
  {
    std::lock_guard lock(mutex_);
    if (const auto it = full_cache_.find(key); it != full_cache_.end()) return it->second;
  }
  const Complex value = smoothed_bispectral(x_, w_, params_.L_n, p).value;
  std::lock_guard lock(mutex_);
  full_cache_.emplace(key, value);
  return value;
}

std::shared_ptr<const std::vector<double>> PeriodicityTester::block_diagonal(Frequency f) const {
  {
    std::lock_guard lock(mutex_);
    if (const auto it = diag_cache_.find(f.value()); it != diag_cache_.end()) return it->second;
  }
  auto values = std::make_shared<const std::vector<double>>(
      block_smoothed_bispectral(x_, w_, params_.b, params_.L_b, {f, f}).re);
  std::lock_guard lock(mutex_);
  return diag_cache_.emplace(f.value(), std::move(values)).first->second;
}

TestOutcome PeriodicityTester::test_P_subsampling(BifrequencyPoint p) const {
  try {
    const Complex full = full_estimate(p);
    const BlockEstimates blocks = block_smoothed_bispectral(x_, w_, params_.b, params_.L_b, p);
    EmpiricalDistribution dist;
    if (centering_ == Centering::Difference) {
      dist = difference_distribution(blocks, {}, {}, full, params_.b, params_.L_b);
    } else {
      dist = distribution_from_blocks_P(blocks, centering_ == Centering::None ? 0.0 : std::abs(full), params_.b,
                                        params_.L_b);
    }
    return decided(TestMethod::SubsP, p, normalizer_ * std::abs(full), quantile(dist, 1.0 - params_.alpha));
  } catch (const NumericDegeneracy& e) {
    return undetermined(TestMethod::SubsP, p, e.what());
  }
}

TestOutcome PeriodicityTester::test_gamma_subsampling(BifrequencyPoint p) const {
  if (p.is_diagonal()) throw InvalidArgument("coherence test requires nu != omega");
  try {
    const Complex g = full_estimate(p);
    const double g_nu = full_estimate({p.nu, p.nu}).real();
    const double g_om = full_estimate({p.omega, p.omega}).real();
    const double gamma = coherence_from(g, g_nu, g_om, false);
    const auto d_nu = block_diagonal(p.nu);
    const auto d_om = block_diagonal(p.omega);
    const BlockEstimates blocks = block_smoothed_bispectral(x_, w_, params_.b, params_.L_b, p);
    EmpiricalDistribution dist;
    if (centering_ == Centering::Difference) {
      dist = difference_distribution(blocks, *d_nu, *d_om, g / std::sqrt(std::abs(g_nu * g_om)), params_.b,
                                     params_.L_b);
    } else {
      dist = distribution_from_blocks_gamma(blocks, *d_nu, *d_om, centering_ == Centering::None ? 0.0 : gamma,
                                            params_.b, params_.L_b);
    }
    return decided(TestMethod::SubsGamma, p, normalizer_ * gamma, quantile(dist, 1.0 - params_.alpha));
  } catch (const NumericDegeneracy& e) {
    return undetermined(TestMethod::SubsGamma, p, e.what());
  }
}

TestOutcome PeriodicityTester::test_P_chi2(BifrequencyPoint p) const {
  const BifrequencyPoint p_bar = p.conjugate();
  const SpectralTruth plugin{[this, p, p_bar](BifrequencyPoint q) -> Complex {
    if (q == p || q == p_bar) return {0.0, 0.0};
    return full_estimate(q);
  }};
  const Cov2 sigma = sigma_matrix(plugin, w_.rho(), p, SigmaVariant::KernelDerived);
  if (!(sigma.s11 > 0.0) || !(sigma.s22 > 0.0)) {
    return undetermined(TestMethod::Chi2P, p, "nonpositive plug-in variance");
  }
  const Complex g = full_estimate(p);
  const double n_over_l = normalizer_ * normalizer_;
  const double statistic = n_over_l * (g.real() * g.real() / sigma.s11 + g.imag() * g.imag() / sigma.s22);
  return decided(TestMethod::Chi2P, p, statistic, chi2_2_critical(params_.alpha));
}

TestOutcome PeriodicityTester::test(TestMethod method, BifrequencyPoint p) const {
  switch (method) {
    case TestMethod::SubsP:
      return test_P_subsampling(p);
    case TestMethod::SubsGamma:
      return test_gamma_subsampling(p);
    case TestMethod::Chi2P:
      return test_P_chi2(p);
  }
  throw InvalidArgument("unknown test method");
}

TestOutcome test_P_subsampling(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                               BifrequencyPoint p, Centering centering) {
  return PeriodicityTester(x, w, params, centering).test_P_subsampling(p);
}

TestOutcome test_gamma_subsampling(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                                   BifrequencyPoint p, Centering centering) {
  return PeriodicityTester(x, w, params, centering).test_gamma_subsampling(p);
}

TestOutcome test_P_chi2(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                        BifrequencyPoint p) {
  return PeriodicityTester(x, w, params).test_P_chi2(p);
}

Frequency grid_frequency(int k, int grid_size) {
  return Frequency(kTwoPi * (static_cast<double>(k) / grid_size));
}

ScanResult scan(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params, int grid_size,
                TestMethod method, unsigned threads, Centering centering) {
  if (grid_size < 2) throw InvalidArgument("grid size must be >= 2");
  const PeriodicityTester tester(x, w, params, centering);
  ScanResult result;
  result.grid_size = grid_size;
  result.method = method;
  result.centering = centering;
  result.params = params;
  const auto g = static_cast<std::size_t>(grid_size);
  result.outcomes.resize(g * (g - 1));
  for (int s = 1; s <= grid_size; ++s) {
    int column = 0;
    for (int t = 1; t <= grid_size; ++t) {
      if (s == t) continue;
      const std::size_t idx = static_cast<std::size_t>(s - 1) * (g - 1) + static_cast<std::size_t>(column++);
      result.outcomes[idx].s = s;
      result.outcomes[idx].t = t;
    }
  }
  parallel_for(result.outcomes.size(), threads, [&](std::size_t i) {
    ScanCell& cell = result.outcomes[i];
    const BifrequencyPoint p{grid_frequency(cell.s, grid_size), grid_frequency(cell.t, grid_size)};
    try {
      cell.outcome = tester.test(method, p);
    } catch (const std::exception& e) {
      cell.outcome = undetermined(method, p, e.what());
    }
  });
  return result;
}

}  // namespace apc
