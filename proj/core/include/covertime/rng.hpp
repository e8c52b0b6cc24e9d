#pragma once

#include <cstdint>
#include <random>

namespace covertime {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for replication `run`. Depends only on (seed_base, run), so adding
/// runs never perturbs earlier ones.
std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t run) noexcept;

/// Deterministic random stream. The engine is std::mt19937_64 (fully
/// specified by the standard); the distributions are implemented here
/// because the standard library's are implementation-defined, and runs must
/// be bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on {0, ..., n-1}; n >= 1. Always consumes at least one draw.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform on (0, 1].
  double uniform_open01() { return 1.0 - uniform01(); }

  /// Standard normal via the Marsaglia polar method.
  double standard_normal();

  /// Pareto(shape, scale) by inverse CDF; every draw is >= scale.
  double pareto(double shape, double scale);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace covertime
