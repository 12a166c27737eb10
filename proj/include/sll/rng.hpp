#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>

namespace sll {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based seed splitting: trial i of a run with master seed s gets an
// independent stream seed, stable across thread counts and platforms.
inline uint64_t split_seed(uint64_t master, uint64_t index) {
  uint64_t st = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  uint64_t a = splitmix64(st);
  uint64_t b = splitmix64(st);
  return a ^ (b << 1);
}

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t st = seed;
    for (auto& w : s_) w = splitmix64(st);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in (0,1)
  double uniform() { return (next_u64() >> 11) * 0x1p-53 + 0x1p-54; }

  // standard normal via the polar method, one cached value
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, r2;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

  void fill_gaussian(std::span<double> out) {
    for (auto& x : out) x = gaussian();
  }

  // +/-1 with equal probability, 64 values per underlying draw; the sign is
  // written directly into the bit pattern of 1.0
  void fill_rademacher(std::span<double> out) {
    constexpr uint64_t kOne = 0x3ff0000000000000ULL;
    std::size_t i = 0;
    const std::size_t n = out.size();
    for (; i + 64 <= n; i += 64) {
      const uint64_t bits = next_u64();
      for (int j = 0; j < 64; ++j) {
        const uint64_t sign = ((bits >> j) & 1u) << 63;
        out[i + j] = std::bit_cast<double>(kOne | sign);
      }
    }
    if (i < n) {
      const uint64_t bits = next_u64();
      for (int j = 0; i < n; ++i, ++j) {
        const uint64_t sign = ((bits >> j) & 1u) << 63;
        out[i] = std::bit_cast<double>(kOne | sign);
      }
    }
  }

  double rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sll
