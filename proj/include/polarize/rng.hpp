#pragma once

#include <cstdint>
#include <random>

namespace polarize {

/// Deterministic random source. Every stream is derived from one root seed;
/// `split()` hands out an independent child stream so that sub-tasks (one per
/// sweep point, one per instance) draw reproducibly regardless of order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits; identical on every platform.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

  Rng split();

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace polarize
