#pragma once
#include <cmath>
#include <cstdint>
#include <vector>

namespace creinn {

// Single PRNG used everywhere: xoshiro256++ seeded from splitmix64.
// Streams are decorrelated by folding a stream id into the seed, so e.g.
// parameter init and data shuffling never share a sequence.
struct Rng {
  uint64_t s[4];

  static uint64_t splitmix64(uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  explicit Rng(uint64_t seed, uint64_t stream = 0) {
    uint64_t x = seed ^ (stream * 0xD1B54A32D192ED03ULL);
    for (auto& w : s) w = splitmix64(x);
  }

  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t next_u64() {
    uint64_t r = rotl(s[0] + s[3], 23) + s[0];
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return r;
  }

  // Uniform double in [0,1) with 53 random bits.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; draws are consumed in pairs and the spare is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double m = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = m * std::sin(a);
    have_spare_ = true;
    return m * std::cos(a);
  }

  // Integer in [0, n) by rejection-free modulo of a 64-bit draw; bias is
  // negligible for the n used here (n << 2^32).
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace creinn
