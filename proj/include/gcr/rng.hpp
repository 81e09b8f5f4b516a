#pragma once

#include <cstdint>

namespace gcr {

// splitmix64: small, fast, and stable across platforms. Every randomized
// routine in the library derives its stream from a user seed through this
// generator so that results are reproducible bit-for-bit.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform double in [0, 1)
  double next_u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_u01() < p; }
};

// Derives an independent stream for a sub-task (replicate id, sweep cell, ...)
// from a master seed. Mixing both words through an extra splitmix round keeps
// streams decorrelated even for consecutive ids.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
  SplitMix64 s(seed ^ (0x6a09e667f3bcc909ULL + stream_id * 0x3c6ef372fe94f82bULL));
  s.next();
  return s.next();
}

}  // namespace gcr
