// Deterministic splittable PRNG. All randomness in the project flows from a
// single 64-bit seed; child streams are derived by mixing a stream tag into
// the parent seed, so runs are reproducible across platforms.
#pragma once

#include <cstdint>

namespace isslab {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  int next_int(int n) { return int(next_u64() % std::uint64_t(n)); }

  // Child stream for a named sub-task; independent of draws on the parent.
  SplitMix64 split(std::uint64_t tag) const {
    SplitMix64 mixer(state_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
    return SplitMix64(mixer.next_u64());
  }

 private:
  std::uint64_t state_;
};

}  // namespace isslab
