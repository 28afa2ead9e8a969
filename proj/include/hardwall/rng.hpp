#pragma once

#include <cmath>
#include <cstdint>

namespace hardwall {

// Deterministic, seed-stable generators: outputs must be identical across
// platforms and thread counts, so everything is hand-rolled fixed-width
// integer arithmetic plus libm.

struct SplitMix64 {
  std::uint64_t x = 0;
  std::uint64_t next() {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Independent stream for a (master seed, stream index) pair.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 sm{master ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull)};
  std::uint64_t z = sm.next();
  return z ^ sm.next() >> 1;
}

struct Xoshiro256pp {
  std::uint64_t s[4] = {1, 2, 3, 4};

  static Xoshiro256pp seeded(std::uint64_t seed) {
    SplitMix64 sm{seed};
    Xoshiro256pp r;
    for (auto& w : r.s) w = sm.next();
    return r;
  }

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t next() {
    std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // uniform in [0, 1) with 53 random bits
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }
};

// Standard normals by the Marsaglia polar method with a cached spare.
struct NormalSampler {
  Xoshiro256pp rng;
  bool has_spare = false;
  double spare = 0.0;

  explicit NormalSampler(Xoshiro256pp r) : rng(r) {}
  explicit NormalSampler(std::uint64_t seed) : rng(Xoshiro256pp::seeded(seed)) {}

  double next() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u, v, s;
    do {
      u = 2.0 * rng.uniform01() - 1.0;
      v = 2.0 * rng.uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare = v * f;
    has_spare = true;
    return u * f;
  }
};

}  // namespace hardwall
