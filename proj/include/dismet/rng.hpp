#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>

namespace dismet {

// Counter-based random streams. Every draw is a pure function of
// (seed, stream tag, counters), so results do not depend on evaluation
// order or thread schedule, and the same (draw index, latent index) pair
// yields the same normal variate in every subset estimate. That sharing is
// what gives the subset-difference estimators their common random numbers.

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum Stream : std::uint64_t {
  kSourceIndex = 1,   // which dataset row a draw comes from
  kNormalA = 2,       // Box-Muller uniform #1
  kNormalB = 3,       // Box-Muller uniform #2
  kCorrNormalA = 4,   // draws used by the sample-correlation matrix
  kCorrNormalB = 5,
  kGeneric = 6,
};

inline std::uint64_t hash4(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

/// Uniform in the open interval (0, 1).
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// Standard normal for counters (a, b) on the given stream pair.
inline double normal(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b,
                     std::uint64_t a, std::uint64_t b) {
  double u1 = to_unit(hash4(seed, stream_a, a, b));
  double u2 = to_unit(hash4(seed, stream_b, a, b));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Normal variate shared by all subset estimators: draw m, latent i.
inline double latent_normal(std::uint64_t seed, std::uint64_t m, std::uint64_t latent) {
  return normal(seed, kNormalA, kNormalB, m, latent);
}

/// Index of the dataset row that seeds draw m.
inline std::size_t source_index(std::uint64_t seed, std::uint64_t m, std::size_t n) {
  std::uint64_t bits = hash4(seed, kSourceIndex, m, 0);
  // Fixed-point multiply maps the 64-bit word onto [0, n) without a data-
  // dependent loop; the bias is below 2^-50 for any dataset size seen here.
  return static_cast<std::size_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace rng
}  // namespace dismet
