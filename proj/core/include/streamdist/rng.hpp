#pragma once

#include <cstdint>

namespace streamdist {

//! 64-bit finalizer with full avalanche (the SplitMix64 output function).
//! Doubles as the project hash for sketch and coin-flip derivations.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Stateless combiner for derived streams: hash of (seed, a, b) with the
//! same replay property as the generator itself.
inline uint64_t hash3(uint64_t seed, uint64_t a, uint64_t b) {
  return mix64(mix64(mix64(seed) ^ a) ^ b);
}

//! Map a 64-bit hash to [0, 1) using the top 53 bits.
inline double unit_from_bits(uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1p-53;
}

//! Counter-based SplitMix64 generator. State is a single 64-bit counter, so
//! the k-th output is a pure function of (seed, k) and any trace can be
//! replayed or re-derived in another language from the seed alone.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  //! Uniform double in [0, 1).
  double next_unit() { return unit_from_bits(next()); }

  //! Uniform integer in [0, bound), unbiased via rejection.
  uint64_t next_below(uint64_t bound) {
    // largest multiple of bound that fits in 64 bits
    uint64_t limit = ~uint64_t{0} - ~uint64_t{0} % bound;
    uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

 private:
  uint64_t state_;
};

}  // namespace streamdist
