#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace cbstream {

/// Seeded generator shared by every stochastic component. The engine is the
/// standardized mt19937_64 and every derived draw is computed here rather than
/// through <random> distributions, so sequences do not depend on the stdlib.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Knuth's multiplication method; adequate for the small rates used here.
  int poisson(double lambda);
  /// Box-Muller without caching the second variate (keeps state in the engine only).
  double normal();

  std::string state() const;
  void restore(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Derives independent stream seeds from a master seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace cbstream
