#include "apc/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace apc {

namespace {

std::string degenerate_message(double g_nu, double g_omega) {
  std::ostringstream os;
  os << "degenerate coherence denominator: Re G(nu,nu)=" << g_nu
     << ", Re G(omega,omega)=" << g_omega;
  return os.str();
}

}  // namespace

DegenerateDenominator::DegenerateDenominator(double g_nu, double g_omega)
    : NumericDegeneracy(degenerate_message(g_nu, g_omega)), g_nu_(g_nu), g_omega_(g_omega) {}

double canonicalize_angle(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("frequency must be finite");
  double r = std::fmod(x, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r;
}

TimeSeries::TimeSeries(std::int64_t start_index, std::vector<double> samples)
    : start_index_(start_index) {
  if (samples.empty()) throw InvalidArgument("time series must contain at least one sample");
  for (double v : samples) {
    if (!std::isfinite(v)) throw InvalidArgument("time series samples must be finite");
  }
  length_ = samples.size();
  storage_ = std::make_shared<const std::vector<double>>(std::move(samples));
}

TimeSeries TimeSeries::block(std::size_t offset, std::size_t length) const {
  if (length == 0 || offset > length_ || length > length_ - offset) {
    throw InvalidArgument("block range outside the series");
  }
  return TimeSeries(storage_, offset_ + offset, length,
                    start_index_ + static_cast<std::int64_t>(offset));
}

double TimeSeries::max_abs() const noexcept {
  double m = 0.0;
  for (double v : samples()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace apc
