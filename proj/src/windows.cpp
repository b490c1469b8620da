#include "apc/windows.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

#include "apc/core.hpp"

namespace apc {

namespace {

constexpr int kValidationPoints = 10001;
constexpr double kValidationSlack = 1e-12;

void validate_custom(const LagWindowSpec::Taper& w, double theta, double lipschitz) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("window theta must lie in (0, 1]");
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) {
    throw InvalidArgument("window Lipschitz constant must be finite and nonnegative");
  }
  const double step = 2.0 / (kValidationPoints - 1);
  double prev_x = -1.0;
  double prev_w = w(-1.0);
  for (int i = 0; i < kValidationPoints; ++i) {
    const double x = -1.0 + i * step;
    const double wx = w(x);
    if (!std::isfinite(wx) || wx < -kValidationSlack || wx > 1.0 + kValidationSlack) {
      throw InvalidArgument("window taper must take values in [0, 1]");
    }
    if (std::abs(wx - w(-x)) > kValidationSlack) throw InvalidArgument("window taper must be even");
    if (std::abs(x) <= theta && std::abs(wx - 1.0) > kValidationSlack) {
      throw InvalidArgument("window taper must equal 1 on [-theta, theta]");
    }
    if (i > 0) {
      if (std::abs(wx - prev_w) > lipschitz * (x - prev_x) + kValidationSlack) {
        throw InvalidArgument("window taper violates its declared Lipschitz constant");
      }
      if (x > 0.0 && prev_x >= 0.0 && wx > prev_w + kValidationSlack) {
        throw InvalidArgument("window taper must be non-increasing on [0, 1]");
      }
    }
    prev_x = x;
    prev_w = wx;
  }
  for (int i = 1; i <= 100; ++i) {
    const double x = 1.0 + i * 0.01;
    if (w(x) != 0.0 || w(-x) != 0.0) throw InvalidArgument("window taper must vanish outside [-1, 1]");
  }
}

}  // namespace

LagWindowSpec LagWindowSpec::truncated() { return LagWindowSpec{}; }

LagWindowSpec LagWindowSpec::trapezoid(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("trapezoid theta must lie in (0, 1]");
  LagWindowSpec spec;
  spec.kind_ = Kind::FlatTopTrapezoid;
  spec.theta_ = theta;
  spec.lipschitz_ = theta < 1.0 ? 1.0 / (1.0 - theta) : 0.0;
  return spec;
}

LagWindowSpec LagWindowSpec::custom(std::string name, Taper taper, double theta, double lipschitz) {
  if (!taper) throw InvalidArgument("custom window needs a taper function");
  validate_custom(taper, theta, lipschitz);
  LagWindowSpec spec;
  spec.kind_ = Kind::Custom;
  spec.theta_ = theta;
  spec.lipschitz_ = lipschitz;
  spec.custom_name_ = std::move(name);
  spec.taper_ = std::move(taper);
  return spec;
}

LagWindowSpec LagWindowSpec::parse(std::string_view text) {
  if (text == "truncated") return truncated();
  constexpr std::string_view prefix = "trapezoid:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string_view num = text.substr(prefix.size());
    double theta = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), theta);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      throw InvalidArgument("bad trapezoid theta: " + std::string(num));
    }
    return trapezoid(theta);
  }
  throw InvalidArgument("unknown window '" + std::string(text) + "' (expected truncated|trapezoid:<theta>)");
}

std::string LagWindowSpec::name() const {
  switch (kind_) {
    case Kind::Truncated:
      return "truncated";
    case Kind::FlatTopTrapezoid: {
      std::ostringstream os;
      os.precision(17);
      os << "trapezoid:" << theta_;
      return os.str();
    }
    case Kind::Custom:
      return "custom:" + custom_name_;
  }
  return {};
}

double LagWindowSpec::operator()(double x) const {
  const double a = std::abs(x);
  if (a > 1.0) return 0.0;
  switch (kind_) {
    case Kind::Truncated:
      return 1.0;
    case Kind::FlatTopTrapezoid:
      if (a <= theta_) return 1.0;
      return (1.0 - a) / (1.0 - theta_);
    case Kind::Custom:
      return taper_(x);
  }
  return 0.0;
}

std::vector<double> LagWindowSpec::lag_weights(int L) const {
  if (L < 1) throw InvalidArgument("lag window bandwidth L must be >= 1");
  std::vector<double> out(2 * static_cast<std::size_t>(L) + 1);
  for (int tau = -L; tau <= L; ++tau) {
    out[static_cast<std::size_t>(tau + L)] = (*this)(static_cast<double>(tau) / L);
  }
  return out;
}

std::vector<double> LagWindowSpec::half_weights(int L) const {
  if (L < 1) throw InvalidArgument("lag window bandwidth L must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(L) + 1);
  for (int tau = 0; tau <= L; ++tau) out[static_cast<std::size_t>(tau)] = (*this)(static_cast<double>(tau) / L);
  return out;
}

double LagWindowSpec::rho() const {
  switch (kind_) {
    case Kind::Truncated:
      return 2.0;
    case Kind::FlatTopTrapezoid:
      return 2.0 * theta_ + 2.0 * (1.0 - theta_) / 3.0;
    case Kind::Custom: {
      // Even integrand; split at theta so the kink is an endpoint.
      auto sq = [this](double x) {
        const double v = taper_(x);
        return v * v;
      };
      using boost::math::quadrature::gauss_kronrod;
      double tail = 0.0;
      if (theta_ < 1.0) tail = gauss_kronrod<double, 31>::integrate(sq, theta_, 1.0, 20, 1e-12);
      return 2.0 * (theta_ + tail);
    }
  }
  return 0.0;
}

}  // namespace apc
