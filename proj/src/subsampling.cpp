#include "apc/subsampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apc/kernels.hpp"

namespace apc {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
}

void check_conf(double conf) {
  if (!(conf > 0.0 && conf < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
}

std::vector<double> block_diagonal(const TimeSeries& x, const LagWindowSpec& w, std::size_t b, int L,
                                   Frequency f) {
  return block_smoothed_bispectral(x, w, b, L, {f, f}).re;
}

}  // namespace

void SubsamplingParams::validate(std::size_t n) const {
  if (L_b < 1 || static_cast<std::size_t>(L_b) >= b) throw InvalidArgument("need 1 <= L_b < b");
  if (b > n) throw InvalidArgument("block length b must not exceed n");
  if (L_n < 1 || static_cast<std::size_t>(L_n) >= n) throw InvalidArgument("need 1 <= L_n < n");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

void SubsamplingParams::validate_for_subsampling(std::size_t n) const {
  validate(n);
  if (n - b + 1 < kMinimumBlocks) throw InvalidArgument("subsampling needs n - b + 1 >= 8 blocks");
}

long round_half_away(double x) { return std::lround(x); }

SubsamplingParams default_params(std::size_t n) {
  if (n < 16) throw InvalidArgument("default parameters need n >= 16");
  const auto nd = static_cast<double>(n);
  SubsamplingParams params;
  params.L_n = static_cast<int>(std::max(1L, round_half_away(std::pow(nd, 0.2))));
  params.b = static_cast<std::size_t>(std::max(2L, round_half_away(3.0 * std::sqrt(nd))));
  params.b = std::min(params.b, n);
  params.L_b = static_cast<int>(std::max(1L, round_half_away(std::pow(static_cast<double>(params.b), 0.2))));
  params.L_b = std::min(params.L_b, static_cast<int>(params.b) - 1);
  params.L_n = std::min(params.L_n, static_cast<int>(n) - 1);
  params.alpha = 0.01;
  params.validate(n);
  return params;
}

double EmpiricalDistribution::cdf(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

double quantile(const EmpiricalDistribution& dist, double level) {
  check_level(level);
  const std::size_t m = dist.values.size();
  if (m == 0) throw InvalidArgument("quantile of an empty distribution");
  const double md = static_cast<double>(m);
  auto k = static_cast<std::size_t>(std::ceil(level * md));
  k = std::clamp<std::size_t>(k, 1, m);
  // Settle rounding in level * m: k is the smallest count with k / m >= level.
  while (k > 1 && static_cast<double>(k - 1) / md >= level) --k;
  while (k < m && static_cast<double>(k) / md < level) ++k;
  return dist.values[k - 1];
}

EmpiricalDistribution distribution_from_blocks_P(const BlockEstimates& blocks, double full_magnitude,
                                                 std::size_t b, int L_b) {
  EmpiricalDistribution dist;
  dist.b = b;
  dist.L_b = L_b;
  dist.values.resize(blocks.size());
  kernels::magnitudes(blocks.re, blocks.im, dist.values);
  const double scale = std::sqrt(static_cast<double>(b) / L_b);
  for (double& v : dist.values) v = scale * (v - full_magnitude);
  std::sort(dist.values.begin(), dist.values.end());
  return dist;
}

EmpiricalDistribution distribution_from_blocks_gamma(const BlockEstimates& blocks,
                                                     std::span<const double> diag_nu,
                                                     std::span<const double> diag_omega,
                                                     double full_coherence, std::size_t b, int L_b) {
  const std::size_t m = blocks.size();
  std::vector<double> ratios(m);
  kernels::coherence_ratios(blocks.re, blocks.im, diag_nu, diag_omega, ratios);
  EmpiricalDistribution dist;
  dist.b = b;
  dist.L_b = L_b;
  dist.values.reserve(m);
  const double scale = std::sqrt(static_cast<double>(b) / L_b);
  for (double r : ratios) {
    if (std::isnan(r)) {
      ++dist.excluded;
      continue;
    }
    dist.values.push_back(scale * (r - full_coherence));
  }
  if (static_cast<double>(dist.excluded) > kMaxExcludedFraction * static_cast<double>(m)) {
    throw NumericDegeneracy("too many subsampling blocks with a degenerate coherence denominator (" +
                            std::to_string(dist.excluded) + " of " + std::to_string(m) + ")");
  }
  std::sort(dist.values.begin(), dist.values.end());
  return dist;
}

EmpiricalDistribution subsample_distribution_P(const TimeSeries& x, const LagWindowSpec& w,
                                               const SubsamplingParams& params, BifrequencyPoint p) {
  params.validate_for_subsampling(x.size());
  const double full = std::abs(smoothed_bispectral(x, w, params.L_n, p).value);
  return distribution_from_blocks_P(block_smoothed_bispectral(x, w, params.b, params.L_b, p), full, params.b,
                                    params.L_b);
}

EmpiricalDistribution subsample_distribution_gamma(const TimeSeries& x, const LagWindowSpec& w,
                                                   const SubsamplingParams& params, BifrequencyPoint p) {
  if (p.is_diagonal()) throw InvalidArgument("coherence subsampling requires nu != omega");
  params.validate_for_subsampling(x.size());
  const double full = coherence_stat(x, w, params.L_n, p);
  const BlockEstimates blocks = block_smoothed_bispectral(x, w, params.b, params.L_b, p);
  const std::vector<double> d_nu = block_diagonal(x, w, params.b, params.L_b, p.nu);
  const std::vector<double> d_om = block_diagonal(x, w, params.b, params.L_b, p.omega);
  return distribution_from_blocks_gamma(blocks, d_nu, d_om, full, params.b, params.L_b);
}

Interval interval_from(const EmpiricalDistribution& dist, double estimate, double normalizer, double conf,
                       double upper_bound) {
  check_conf(conf);
  const double a = 1.0 - conf;
  Interval iv;
  iv.estimate = estimate;
  iv.lo = estimate - quantile(dist, 1.0 - a / 2.0) / normalizer;
  iv.hi = estimate - quantile(dist, a / 2.0) / normalizer;
  if (iv.lo < 0.0) {
    iv.lo = 0.0;
    iv.lo_clamped = true;
  }
  if (iv.hi > upper_bound) {
    iv.hi = upper_bound;
    iv.hi_clamped = true;
  }
  if (iv.hi < iv.lo) {
    // Only reachable after clamping; keep the interval well formed.
    if (iv.lo_clamped) iv.hi = iv.lo;
    else iv.lo = iv.hi;
  }
  return iv;
}

Interval ci_magnitude_P(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                        BifrequencyPoint p, double conf) {
  check_conf(conf);
  params.validate_for_subsampling(x.size());
  const SpectralEstimate full = smoothed_bispectral(x, w, params.L_n, p);
  const double mag = std::abs(full.value);
  const EmpiricalDistribution dist =
      distribution_from_blocks_P(block_smoothed_bispectral(x, w, params.b, params.L_b, p), mag, params.b, params.L_b);
  return interval_from(dist, mag, full.normalizer(), conf, std::numeric_limits<double>::infinity());
}

Interval ci_coherence(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                      BifrequencyPoint p, double conf) {
  check_conf(conf);
  const EmpiricalDistribution dist = subsample_distribution_gamma(x, w, params, p);
  const double full = coherence_stat(x, w, params.L_n, p);
  const double normalizer = std::sqrt(static_cast<double>(x.size()) / params.L_n);
  return interval_from(dist, full, normalizer, conf, 1.0);
}

}  // namespace apc
