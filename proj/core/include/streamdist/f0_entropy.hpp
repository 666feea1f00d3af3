#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "streamdist/f0_sketch.hpp"

namespace streamdist {

struct F0EntropyParams {
  uint64_t n = 0;        // base set size
  uint64_t max_len = 0;  // ladder covers streams up to this many tokens
  double eps = 0.1;      // rung spacing and level dilation accuracy
  double eps0 = 0.05;    // per-sketch distinct-count accuracy
  double sketch_delta = 0.05;
  uint64_t seed = 0;
};

struct F0EntropyReport {
  double raw = 0;             // sum over levels of f_j / 2^j at the chosen rung
  double bias_adjusted = 0;   // (raw - 2) * t / (1 - 1/e)
  double t = 0;               // dilation (1+eps)^2
  uint64_t m = 0;
  uint64_t levels = 0;
  uint64_t chosen_rung = 0;
  double rung_guess = 0;      // length guess of the chosen rung
  std::vector<double> level_estimates;  // f_j indexed by level-1
  uint64_t live_space_words = 0;
  uint64_t peak_space_words = 0;
};

//! Streaming entropy estimator built on distinct counting. Maintains a
//! ladder of stream-length guesses g_i = (1+eps)^i; each live rung keeps
//! one distinct-count sketch per level j = 1..k and a token enters level j
//! of rung i with probability min(1, 2^j / (g_i * t)). A rung is freed once
//! the stream has outgrown its window [g_i, (1+eps) g_i). At the end the
//! rung whose window contains m reports sum_j f_j / 2^j; the expectation of
//! that sum is sandwiched between (1-1/e)(H-1)/t and (1+eps)^2 H/t + 2.
class F0EntropyEstimator {
 public:
  explicit F0EntropyEstimator(const F0EntropyParams& params);

  void feed(uint64_t item);
  //! Callable once all tokens were fed; keeps state so space can be read.
  F0EntropyReport report() const;

  uint64_t tokens_fed() const { return m_; }
  uint64_t levels() const { return levels_; }
  uint64_t rung_count() const { return static_cast<uint64_t>(rungs_.size()); }
  uint64_t live_space_words() const { return live_words_; }
  uint64_t peak_space_words() const { return peak_words_; }

  //! Expected-value window for the raw sum given the true entropy in bits.
  static std::pair<double, double> raw_sum_window(double entropy_bits, double eps);

 private:
  struct Rung {
    double guess = 0;
    std::vector<F0Sketch> sketches;  // one per level
    bool live = true;
  };

  F0EntropyParams params_;
  double t_;
  uint64_t levels_;
  uint64_t coin_seed_;
  uint64_t sketch_seed_;
  uint64_t m_ = 0;
  size_t first_live_ = 0;
  std::vector<Rung> rungs_;
  // thresholds_[j-1][i] = min(1, 2^j / (guess_i * t)), non-increasing in i
  std::vector<std::vector<double>> thresholds_;
  uint64_t live_words_ = 0;
  uint64_t peak_words_ = 0;

  void drop_outgrown();
};

}  // namespace streamdist
