#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace bisbm {

struct Seed {
  std::uint64_t value = 0;
};

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for a (seed, key...) path. Used to give every row, trial and
/// pipeline stage its own independent stream.
inline constexpr Seed derive(Seed s, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(s.value ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x9e3779b97f4a7c15ULL));
  return Seed{h};
}

/// Counter-based generator: output i is mix64(key + (i+1) * golden gamma).
/// Satisfies UniformRandomBitGenerator so std distributions can draw from it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(Seed s) : state_(mix64(s.value)) {}
  Stream(Seed s, std::uint64_t key) : Stream(derive(s, {key})) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in (0, 1], 53 bits.
  double uniform_pos() {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double prob) { return uniform() < prob; }

  double gaussian() {
    // Box-Muller, one sample per call.
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace bisbm
