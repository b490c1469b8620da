#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace apc {

/// Lag-window taper w with the flat-top / compact-support / Lipschitz contract.
///
/// Built-in kinds:
///   - Truncated: indicator of [-1, 1] (theta = 1).
///   - FlatTopTrapezoid(theta): 1 on [0, theta], linear down to 0 at 1.
///   - Custom: user taper with declared theta and Lipschitz constant W,
///     validated on a 10,001-point grid at construction.
class LagWindowSpec {
 public:
  enum class Kind { Truncated, FlatTopTrapezoid, Custom };
  using Taper = std::function<double(double)>;

  /// Default-constructed window is Truncated.
  LagWindowSpec() = default;

  static LagWindowSpec truncated();
  static LagWindowSpec trapezoid(double theta);
  /// Throws InvalidArgument when the taper violates the contract on the grid.
  static LagWindowSpec custom(std::string name, Taper taper, double theta, double lipschitz);

  /// `truncated` or `trapezoid:<theta>`.
  static LagWindowSpec parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  double theta() const noexcept { return theta_; }
  double lipschitz() const noexcept { return lipschitz_; }
  std::string name() const;

  /// w(x); zero outside [-1, 1].
  double operator()(double x) const;

  /// Discrete weights H_L(tau) = w(tau / L) for tau = -L..L (index tau + L).
  std::vector<double> lag_weights(int L) const;

  /// H_L(tau) for tau = 0..L; the full table is symmetric.
  std::vector<double> half_weights(int L) const;

  /// rho = integral of w^2 over [-1, 1].
  double rho() const;

 private:
  Kind kind_ = Kind::Truncated;
  double theta_ = 1.0;
  double lipschitz_ = 0.0;
  std::string custom_name_;
  Taper taper_;
};

inline double eval_taper(const LagWindowSpec& spec, double x) { return spec(x); }
inline std::vector<double> lag_weights(const LagWindowSpec& spec, int L) { return spec.lag_weights(L); }
inline double rho(const LagWindowSpec& spec) { return spec.rho(); }

}  // namespace apc
