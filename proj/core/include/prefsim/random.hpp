#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace prefsim {

/// Seeded random stream owned by the caller. The engine's output sequence is
/// fixed by the standard, and the conversions below are written out here
/// rather than using std:: distributions (whose algorithms vary between
/// standard libraries), so streams are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe to pass to log().
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n), n >= 1, by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);

  // Standard Gumbel variate by inverse CDF.
  double gumbel();

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministically derive a child seed from a master seed and a path of
/// stream coordinates (sweep value, seed index, ...).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

}  // namespace prefsim
