#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace apc {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Precondition or argument violation. Every public operation reports bad
/// input through this type (or a subclass).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A statistic that cannot be formed from the data (zero variances, zero
/// normalizers, too many degenerate blocks).
class NumericDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coherence statistic whose normalizing product Re G(nu,nu) * Re G(omega,omega)
/// is zero. Carries the two diagonal values so callers can report them.
class DegenerateDenominator : public NumericDegeneracy {
 public:
  DegenerateDenominator(double g_nu, double g_omega);

  double g_nu() const noexcept { return g_nu_; }
  double g_omega() const noexcept { return g_omega_; }

 private:
  double g_nu_;
  double g_omega_;
};

/// Maps any finite real to (0, 2pi]; 0 maps to 2pi.
double canonicalize_angle(double x);

/// Angular frequency in radians, always canonical: 0 < value <= 2pi.
class Frequency {
 public:
  Frequency() = default;  // 2pi
  explicit Frequency(double radians) : value_(canonicalize_angle(radians)) {}

  double value() const noexcept { return value_; }

  /// canonicalize(2pi - f)
  Frequency reflect() const { return Frequency(kTwoPi - value_); }

  friend bool operator==(Frequency a, Frequency b) noexcept { return a.value_ == b.value_; }
  friend auto operator<=>(Frequency a, Frequency b) noexcept { return a.value_ <=> b.value_; }

 private:
  double value_ = kTwoPi;
};

inline Frequency canonicalize_frequency(double x) { return Frequency(x); }
inline Frequency reflect(Frequency f) { return f.reflect(); }

struct BifrequencyPoint {
  Frequency nu;
  Frequency omega;

  BifrequencyPoint() = default;
  BifrequencyPoint(Frequency n, Frequency o) : nu(n), omega(o) {}
  BifrequencyPoint(double n, double o) : nu(n), omega(o) {}

  bool is_diagonal() const noexcept { return nu == omega; }

  /// (2pi - nu, 2pi - omega): the point whose estimate is the complex conjugate.
  BifrequencyPoint conjugate() const { return {nu.reflect(), omega.reflect()}; }

  friend bool operator==(const BifrequencyPoint&, const BifrequencyPoint&) = default;
};

/// Real-valued sample X_{c+1}, ..., X_{c+d} where c is start_index.
///
/// Samples are shared between a series and the blocks cut from it, so
/// `block()` is O(1) and never copies.
class TimeSeries {
 public:
  TimeSeries(std::int64_t start_index, std::vector<double> samples);
  explicit TimeSeries(std::vector<double> samples) : TimeSeries(0, std::move(samples)) {}

  std::int64_t start_index() const noexcept { return start_index_; }
  std::size_t size() const noexcept { return length_; }
  std::span<const double> samples() const noexcept {
    return {storage_->data() + offset_, length_};
  }
  double operator[](std::size_t i) const noexcept { return (*storage_)[offset_ + i]; }

  /// Absolute time index of sample i (1-based in the c+1..c+d sense).
  std::int64_t absolute_index(std::size_t i) const noexcept {
    return start_index_ + 1 + static_cast<std::int64_t>(i);
  }

  /// Contiguous sub-range [offset, offset+length) with start_index shifted by offset.
  TimeSeries block(std::size_t offset, std::size_t length) const;

  double max_abs() const noexcept;

 private:
  TimeSeries(std::shared_ptr<const std::vector<double>> storage, std::size_t offset,
             std::size_t length, std::int64_t start_index)
      : storage_(std::move(storage)), offset_(offset), length_(length), start_index_(start_index) {}

  std::shared_ptr<const std::vector<double>> storage_;
  std::size_t offset_ = 0;
  std::size_t length_ = 0;
  std::int64_t start_index_ = 0;
};

}  // namespace apc
