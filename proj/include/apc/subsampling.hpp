#pragma once

#include <span>
#include <vector>

#include "apc/core.hpp"
#include "apc/estimators.hpp"
#include "apc/windows.hpp"

namespace apc {

inline constexpr std::size_t kMinimumBlocks = 8;

struct SubsamplingParams {
  std::size_t b = 0;  // block length
  int L_n = 0;        // full-sample bandwidth
  int L_b = 0;        // block bandwidth
  double alpha = 0.01;

  /// Throws InvalidArgument unless 1 <= L_b < b <= n, 1 <= L_n < n and
  /// alpha in (0, 1).
  void validate(std::size_t n) const;

  /// validate(n) plus at least kMinimumBlocks blocks (n - b + 1 >= 8).
  void validate_for_subsampling(std::size_t n) const;
};

/// Round half away from zero; the bracket used by the default parameter rules.
long round_half_away(double x);

/// L_n = [n^{1/5}], b = [3 sqrt(n)], L_b = [b^{1/5}], alpha = 0.01. Requires n >= 16.
SubsamplingParams default_params(std::size_t n);

/// Largest fraction of blocks a coherence distribution may exclude.
inline constexpr double kMaxExcludedFraction = 0.01;

/// Sorted subsampling statistics sqrt(b/L_b) (stat(block) - stat(full)).
struct EmpiricalDistribution {
  std::vector<double> values;  // ascending
  std::size_t b = 0;
  int L_b = 0;
  std::size_t excluded = 0;  // blocks dropped for degenerate denominators

  std::size_t size() const noexcept { return values.size(); }
  /// Fraction of values <= x.
  double cdf(double x) const;
};

/// Smallest order statistic whose empirical CDF reaches level (1-based index
/// ceil(level * m)).
double quantile(const EmpiricalDistribution& dist, double level);

EmpiricalDistribution subsample_distribution_P(const TimeSeries& x, const LagWindowSpec& w,
                                               const SubsamplingParams& params, BifrequencyPoint p);

/// Off-diagonal points only. Blocks whose coherence denominator vanishes are
/// excluded; more than 1% excluded raises NumericDegeneracy.
EmpiricalDistribution subsample_distribution_gamma(const TimeSeries& x, const LagWindowSpec& w,
                                                   const SubsamplingParams& params, BifrequencyPoint p);

/// Assembly from precomputed block estimates, shared with the detection scan.
EmpiricalDistribution distribution_from_blocks_P(const BlockEstimates& blocks, double full_magnitude,
                                                 std::size_t b, int L_b);
EmpiricalDistribution distribution_from_blocks_gamma(const BlockEstimates& blocks,
                                                     std::span<const double> diag_nu,
                                                     std::span<const double> diag_omega,
                                                     double full_coherence, std::size_t b, int L_b);

struct Interval {
  double estimate = 0.0;  // |G_n| or |gamma_n|
  double lo = 0.0;
  double hi = 0.0;
  bool lo_clamped = false;
  bool hi_clamped = false;
};

/// Equal-tailed interval (|G_n| - q(1 - a/2)/sqrt(n/L_n), |G_n| - q(a/2)/sqrt(n/L_n)),
/// a = 1 - conf; lo clamped at 0.
Interval ci_magnitude_P(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                        BifrequencyPoint p, double conf);

/// Same construction for |gamma|, clamped to [0, 1].
Interval ci_coherence(const TimeSeries& x, const LagWindowSpec& w, const SubsamplingParams& params,
                      BifrequencyPoint p, double conf);

/// Interval from a distribution and the full-sample statistic.
Interval interval_from(const EmpiricalDistribution& dist, double estimate, double normalizer, double conf,
                       double upper_bound);

}  // namespace apc
