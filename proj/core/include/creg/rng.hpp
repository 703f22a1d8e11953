#pragma once

#include <cstdint>
#include <random>

#include "creg/types.hpp"

namespace creg {

// splitmix64 finalizer (Vigna). Used only to spread seed bits.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent per-replication stream: engine seeded with
/// splitmix64(seed XOR golden * (rep + 1)). This is the fixed stream
/// derivation every Monte-Carlo experiment in the toolkit uses, so
/// results are reproducible regardless of worker count.
inline std::mt19937_64 replication_engine(std::uint64_t seed,
                                          std::uint64_t replication) {
  const std::uint64_t mixed =
      seed ^ (0x9E3779B97F4A7C15ULL * (replication + 1));
  return std::mt19937_64(splitmix64(mixed));
}

/// n iid N(0, sigma^2) draws from the given engine.
inline Sequence gaussian_vector(std::mt19937_64& eng, std::size_t n,
                                double sigma) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Sequence z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = sigma * normal(eng);
  return z;
}

}  // namespace creg
