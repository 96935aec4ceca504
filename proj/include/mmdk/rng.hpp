#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mmdk {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream derivation for per-run resampling. Results depend only on
// (seed, index), never on thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

// mt19937_64 with explicit value mappings. The engine is fully specified by
// the standard; the standard distributions are not, so every mapping below is
// pinned here to keep generated artifacts byte-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Box-Muller, cosine branch. Two engine draws per variate.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  // Inverse-CDF exponential with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  // Unbiased-enough bounded integer (Lemire multiply-shift, no rejection).
  std::uint64_t uniform_below(std::uint64_t n) {
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(eng_()) * static_cast<unsigned __int128>(n);
    return static_cast<std::uint64_t>(prod >> 64);
  }

  std::uint64_t uniform_in(std::uint64_t lo, std::uint64_t hi) {
    return lo + uniform_below(hi - lo + 1);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mmdk
