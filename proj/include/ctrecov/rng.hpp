#pragma once

#include <cstdint>
#include <cmath>

namespace ctrecov {

// Counter-based SplitMix64 stream (Steele/Lea/Flood mixing constants).
// output(i) = mix64(seed + i * 0x9E3779B97F4A7C15). Stateless apart from the
// counter, so identical (seed, draw sequence) reproduces bit-identically on
// any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ULL;
    return mix(seed_ + counter_);
  }

  // uniform on [0,1)
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on (0,1]
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // uniform integer in [0, bound) by rejection
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t u;
    do {
      u = next_u64();
    } while (u >= limit);
    return u % bound;
  }

  // standard normal via Box-Muller; second value cached
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Seed derivation for independent substreams: folds each field through the
// SplitMix64 mixer so (master, a, b, c) tuples map to well-separated seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = SplitMix64::mix(master + 0x9E3779B97F4A7C15ULL);
  s = SplitMix64::mix(s ^ (a + 0xBF58476D1CE4E5B9ULL));
  s = SplitMix64::mix(s ^ (b + 0x94D049BB133111EBULL));
  s = SplitMix64::mix(s ^ (c + 0x2545F4914F6CDD1DULL));
  return s;
}

}  // namespace ctrecov
