#pragma once

// Self-contained PRNG (xoshiro256**) so that runs reproduce bit-for-bit
// across platforms and standard libraries. std::shuffle and the std
// distributions are implementation-defined and must not be used anywhere
// results feed a trace or a test expectation.

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <vector>
#include <stdexcept>

namespace graphiht {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Unbiased integer in [0, n) via Lemire's multiply-shift with rejection.
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::bounded: n must be positive");
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in (0, 1]; never returns 0 so it is safe under log().
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Draws two uniforms per call; no spare
  // is cached so the draw count per call is fixed.
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform k-subset of {0,...,n-1} without replacement, returned sorted.
  // k == 1 consumes exactly one draw so a singleton batch and a plain
  // index pick share the same stream position.
  std::vector<int> subset(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("Rng::subset: need 0 <= k <= n");
    if (k == 1) return {static_cast<int>(bounded(static_cast<std::uint64_t>(n)))};
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(bounded(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[i], pool[j]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Derives an independent stream from a base seed and a role tag.
inline Rng stream(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t sm = seed ^ (0xa076'1d64'78bd'642fULL * (tag + 1));
  return Rng(splitmix64(sm));
}

}  // namespace graphiht
