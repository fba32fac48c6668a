#pragma once

#include <cmath>
#include <cstdint>

namespace ssctm {

// SplitMix64: tiny 64-bit-seedable generator.  Used for all randomness so
// that results are reproducible bit-for-bit across platforms and toolchains
// (std::mt19937 is portable, but the std distributions are not).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Exponential with the given rate; log1p keeps the argument strictly
  // inside (-1, 0] since next_double() < 1.
  double next_exponential(double rate) { return -std::log1p(-next_double()) / rate; }

  // Uniform index in [0, n).
  int next_index(int n) {
    int i = static_cast<int>(next_double() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed (per replication, probe, ...) from a
// base seed.  Pure function of (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
  g.next_u64();
  return g.next_u64();
}

}  // namespace ssctm
