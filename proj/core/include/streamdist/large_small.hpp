#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "streamdist/rng.hpp"

namespace streamdist {

struct LargeSmallParams {
  uint64_t n = 0;        // base set size, must be > 3
  uint64_t max_len = 0;  // ladder covers streams up to this many tokens
  double alpha = 0.5;    // heaviness exponent: heavy means mass >= n^-alpha
  double eps = 0.05;
  double track_const = 4.0;  // multiplier in the tracking probability
  uint64_t seed = 0;
};

struct LargeSmallReport {
  double estimate = 0;  // bits
  double w_hat = 0;     // mass not attributed to heavy tracked items
  uint64_t m = 0;
  uint64_t chosen_rung = 0;
  uint64_t tracked_items = 0;  // tracked in the chosen rung
  uint64_t heavy_items = 0;    // tracked with count >= m * n^-alpha
  uint64_t cap_hits = 0;       // tracking requests refused by the size cap
  uint64_t live_space_words = 0;
  uint64_t peak_space_words = 0;
};

//! Streaming entropy estimator that tracks likely-heavy items exactly.
//! Doubling ladder of length guesses g_i = 2^i; rung i starts tracking an
//! untracked item on each insertion with probability
//! min(1, track_const * n^alpha * log2(n) / (eps * g_i)) and counts it
//! exactly afterwards, so a tracked count never exceeds the true count.
//! A rung dies once m > 2 g_i. The answer comes from the rung with
//! g_i <= m <= 2 g_i: heavy tracked items contribute (c/m) log2(m/c) and
//! the leftover mass w is spread uniformly, adding w log2(n/w). Spreading
//! the leftover uniformly maximizes its entropy, so the estimate is never
//! below the empirical entropy of the stream.
class LargeSmallEstimator {
 public:
  explicit LargeSmallEstimator(const LargeSmallParams& params);

  void feed(uint64_t item);
  LargeSmallReport report() const;

  uint64_t tokens_fed() const { return m_; }
  uint64_t chosen_rung() const;
  double rung_track_prob(uint64_t i) const { return rungs_[i].track_prob; }
  const std::unordered_map<uint64_t, uint64_t>& rung_counts(uint64_t i) const;
  uint64_t live_space_words() const { return live_words_; }
  uint64_t peak_space_words() const { return peak_words_; }

 private:
  struct Rung {
    double guess = 0;
    double track_prob = 0;
    std::unordered_map<uint64_t, uint64_t> counts;
    bool live = true;
  };

  LargeSmallParams params_;
  SplitMix64 rng_;
  uint64_t m_ = 0;
  uint64_t cap_ = 0;  // per-rung tracked-set bound, 4x the expected size
  uint64_t cap_hits_ = 0;
  size_t first_live_ = 0;
  std::vector<Rung> rungs_;
  uint64_t live_words_ = 0;
  uint64_t peak_words_ = 0;
};

struct LargeSmallBound {
  double factor = 0;    // multiplicative term (1/alpha)(1 + log2(1/eps)/log2 n)
  double additive = 0;  // additive term eps * (log2(n/eps) + n^-alpha)
};

LargeSmallBound large_small_error_bound(double alpha, double eps, uint64_t n);

//! Combined relative error of the estimate at entropy H:
//! alpha * (eps * log2(n/eps) + n^-alpha) / H + log2(1/eps) / log2(n).
double large_small_relative_error(double alpha, double eps, uint64_t n, double entropy_bits);

//! Solves large_small_relative_error(alpha, eps, n, H) = target for eps.
//! The error curve falls and then rises in eps; of the up-to-two roots the
//! larger one is returned (the rising branch is where shrinking eps helps).
//! Throws when target is below the curve minimum or above both endpoints.
double large_small_invert(double alpha, uint64_t n, double entropy_bits, double target);

}  // namespace streamdist
