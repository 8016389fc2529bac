#pragma once

#include <cmath>
#include <cstdint>

namespace qxfer {

// SplitMix64 generator with Box-Muller normals. Hand-rolled instead of
// <random> because std::normal_distribution is not bitwise reproducible
// across standard libraries, and sweep determinism is part of the contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform on (0, 1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  // standard normal
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double two_pi = 6.283185307179586476925287;
    double r = std::sqrt(-2.0 * std::log(next_double()));
    double a = two_pi * next_double();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable mixing hash: per-point seeds derive from (master, point, realization)
// so adding axes or realizations never perturbs existing points' randomness.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (0x9e3779b97f4a7c15ULL + b + (a << 6) + (a >> 2)));
  return r.next_u64();
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

}  // namespace qxfer
