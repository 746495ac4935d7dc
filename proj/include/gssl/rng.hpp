#pragma once

#include <cstdint>
#include <vector>

namespace gssl {

// Deterministic 64-bit generator (splitmix64). The standard <random>
// distributions are implementation-defined, so all sampling used by the
// toolkit goes through this class to keep runs bitwise reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  float uniform_float() { return static_cast<float>(next_u64() >> 40) * 0x1.0p-24f; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (no state caching, two draws per call).
  double normal();

  // Uniform integer in [0, n), unbiased by rejection.
  uint64_t below(uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Fisher-Yates permutation of 0..n-1.
  std::vector<size_t> permutation(size_t n);

  // k distinct indices sampled from 0..n-1 (partial Fisher-Yates), sorted.
  std::vector<size_t> sample_without_replacement(size_t n, size_t k);

 private:
  uint64_t state_;
};

// Derives an independent child seed from (seed, salt); used wherever a run
// fans out into sub-streams (per-epoch shuffles, composed augmentations, ...).
uint64_t mix_seed(uint64_t seed, uint64_t salt);

}  // namespace gssl
