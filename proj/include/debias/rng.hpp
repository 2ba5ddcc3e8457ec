#pragma once

// Deterministic, splittable random streams for the benchmark harness.
// A stream is addressed by (master seed, label, a, b); the same address
// always yields the same draws, independent of any other stream.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace debias {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// xoshiro256++ generator seeded from a (master, label, a, b) address.
/// Streams with distinct addresses are decorrelated by mixing the address
/// through splitmix64 before seeding the state.
class RngStream {
 public:
  RngStream(std::uint64_t master, std::string_view label, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t z = master ^ detail::fnv1a64(label);
    z = detail::splitmix64(z + a * 0x9E3779B97F4A7C15ULL);
    z = detail::splitmix64(z + b * 0xD1B54A32D192ED03ULL);
    for (auto& word : state_) {
      z = detail::splitmix64(z);
      word = z;
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform draw from the open interval (0, 1).
  double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal draw via the Box-Muller transform; consumes two
  /// uniforms per call so the stream position is draw-count invariant.
  double normal() {
    const double u = uniform01();
    const double v = uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
  }

  /// Exponential draw with the given mean.
  double exponential(double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("exponential: mean must be positive");
    return -mean * std::log1p(-uniform01());
  }

  /// Uniform index in [0, n) via the multiply-shift reduction.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::size_t>(wide >> 64);
  }

 private:
  std::uint64_t state_[4];
};

}  // namespace debias
