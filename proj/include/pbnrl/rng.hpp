#pragma once

#include <cstdint>
#include <random>

namespace pbnrl {

/// Seeded pseudo-random source used by every stochastic operation.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// performs its own integer/real conversions so that a given seed produces the
/// same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x5eedULL);

  /// Independent stream `stream` derived from `seed`; used for per-run and
  /// per-initial-state streams so results do not depend on execution order.
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (used only by synthetic data generators).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace pbnrl
