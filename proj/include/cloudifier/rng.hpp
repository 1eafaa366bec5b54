#pragma once

#include <cstdint>
#include <random>

namespace cloudifier {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of stream `index` under a base seed. Counter-based, so the stream for
// a given index does not depend on how many other streams were consumed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Deterministic random source. The distributions are implemented here rather
// than with <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi] (inclusive).
  int uniform_int(int lo, int hi);
  bool bernoulli(double p) { return uniform() < p; }
  // Standard normal via Box-Muller.
  double normal();

  Rng split() { return Rng(next()); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cloudifier
