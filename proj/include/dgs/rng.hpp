#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace dgs::rng {

// SplitMix64: tiny, fast, splittable generator with a single 64-bit word of
// state. Every source of randomness in the library goes through this type so
// that runs are reproducible across platforms, compilers and thread counts.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1], keeps log() finite
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer, used as the mixing step for derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive an independent child seed from structured coordinates. Chaining the
// two-argument form keeps derivations collision-resistant without a real hash.
inline std::uint64_t seed_hash(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL)));
}
inline std::uint64_t seed_hash(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return seed_hash(seed_hash(a, b), c);
}
inline std::uint64_t seed_hash(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                               std::uint64_t d) {
  return seed_hash(seed_hash(seed_hash(a, b), c), d);
}

}  // namespace dgs::rng
