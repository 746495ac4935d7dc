#include "gssl/rng.hpp"

#include <algorithm>
#include <cmath>

#include "gssl/errors.hpp"

namespace gssl {

double Rng::normal() {
  // Box-Muller; u1 nudged away from zero so log() stays finite.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw ContractError("Rng::below(0)");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

std::vector<size_t> Rng::permutation(size_t n) {
  std::vector<size_t> p(n);
  for (size_t i = 0; i < n; ++i) p[i] = i;
  for (size_t i = n; i > 1; --i) {
    size_t j = static_cast<size_t>(below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

std::vector<size_t> Rng::sample_without_replacement(size_t n, size_t k) {
  if (k > n) throw ContractError("sample_without_replacement: k > n");
  std::vector<size_t> pool(n);
  for (size_t i = 0; i < n; ++i) pool[i] = i;
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<size_t> out(pool.begin(), pool.begin() + static_cast<long>(k));
  std::sort(out.begin(), out.end());
  return out;
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  // One splitmix64 step over the xor-combined inputs.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gssl
