#pragma once

#include <cstdint>
#include <random>

namespace apc {

/// Seedable generator with a fixed, documented stream: mt19937_64 bits,
/// 53-bit uniforms, and Box-Muller pairs for standard normals. The standard
/// library's normal_distribution is implementation-defined, so it is not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal.
  double normal();

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer of (seed, stream); used to give each replicate or
/// worker an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace apc
