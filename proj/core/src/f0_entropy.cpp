#include "streamdist/f0_entropy.hpp"

#include <algorithm>
#include <cmath>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {
constexpr uint64_t kCoinTag = 0x636f696e73ULL;
constexpr uint64_t kSketchTag = 0x736b657463ULL;
}  // namespace

F0EntropyEstimator::F0EntropyEstimator(const F0EntropyParams& params) : params_(params) {
  if (params_.n < 2) throw ContractError("f0 entropy: base size must be at least 2");
  if (params_.max_len == 0) throw ContractError("f0 entropy: max_len must be positive");
  if (!(params_.eps > 0.0) || params_.eps >= 1.0)
    throw ContractError("f0 entropy: eps must be in (0,1)");
  t_ = (1.0 + params_.eps) * (1.0 + params_.eps);
  double k = std::ceil(std::log2(static_cast<double>(params_.n) / params_.eps));
  levels_ = std::max<uint64_t>(1, static_cast<uint64_t>(k));
  coin_seed_ = mix64(params_.seed ^ kCoinTag);
  sketch_seed_ = mix64(params_.seed ^ kSketchTag);

  // Rung i covers m in [g_i, (1+eps) g_i); extend until max_len is inside
  // some window even after float rounding of the powers.
  double guess = 1.0;
  size_t i = 0;
  while (true) {
    Rung rung;
    rung.guess = guess;
    rung.sketches.reserve(levels_);
    for (uint64_t j = 1; j <= levels_; ++j) {
      rung.sketches.emplace_back(params_.eps0, params_.sketch_delta,
                                 hash3(sketch_seed_, i, j));
    }
    rungs_.push_back(std::move(rung));
    if (guess > static_cast<double>(params_.max_len)) break;
    guess *= 1.0 + params_.eps;
    ++i;
  }

  thresholds_.assign(levels_, std::vector<double>(rungs_.size()));
  for (uint64_t j = 1; j <= levels_; ++j) {
    double numer = std::ldexp(1.0, static_cast<int>(j));
    for (size_t r = 0; r < rungs_.size(); ++r) {
      thresholds_[j - 1][r] = std::min(1.0, numer / (rungs_[r].guess * t_));
    }
  }
}

void F0EntropyEstimator::drop_outgrown() {
  double m = static_cast<double>(m_);
  while (first_live_ < rungs_.size() &&
         m >= (1.0 + params_.eps) * rungs_[first_live_].guess) {
    Rung& rung = rungs_[first_live_];
    for (const F0Sketch& s : rung.sketches) live_words_ -= s.space_words();
    rung.sketches.clear();
    rung.sketches.shrink_to_fit();
    rung.live = false;
    ++first_live_;
  }
}

void F0EntropyEstimator::feed(uint64_t item) {
  if (m_ >= params_.max_len) throw ContractError("f0 entropy: stream exceeds max_len");
  uint64_t token_index = m_;
  ++m_;
  drop_outgrown();
  if (first_live_ >= rungs_.size()) return;

  for (uint64_t j = 1; j <= levels_; ++j) {
    double u = unit_from_bits(hash3(coin_seed_, token_index, j));
    const std::vector<double>& thr = thresholds_[j - 1];
    // thr is non-increasing in the rung index, so the rungs whose coin
    // succeeds form a prefix of [first_live_, end); find its cutoff.
    if (!(u < thr[first_live_])) continue;
    size_t lo = first_live_;        // u < thr[lo] holds
    size_t hi = rungs_.size() - 1;  // may or may not hold
    if (!(u < thr[hi])) {
      while (hi - lo > 1) {
        size_t mid = lo + (hi - lo) / 2;
        if (u < thr[mid]) lo = mid; else hi = mid;
      }
      hi = lo;
    }
    for (size_t r = first_live_; r <= hi; ++r) {
      live_words_ += rungs_[r].sketches[j - 1].insert(item);
    }
  }
  if (live_words_ > peak_words_) peak_words_ = live_words_;
}

F0EntropyReport F0EntropyEstimator::report() const {
  if (m_ == 0) throw ContractError("f0 entropy: empty stream");
  double m = static_cast<double>(m_);
  size_t chosen = rungs_.size();
  for (size_t r = first_live_; r < rungs_.size(); ++r) {
    if (rungs_[r].guess <= m && m < (1.0 + params_.eps) * rungs_[r].guess) {
      chosen = r;
      break;
    }
  }
  if (chosen == rungs_.size()) throw ContractError("f0 entropy: no rung window contains m");

  F0EntropyReport rep;
  rep.t = t_;
  rep.m = m_;
  rep.levels = levels_;
  rep.chosen_rung = chosen;
  rep.rung_guess = rungs_[chosen].guess;
  rep.level_estimates.reserve(levels_);
  double raw = 0.0;
  for (uint64_t j = 1; j <= levels_; ++j) {
    double fj = rungs_[chosen].sketches[j - 1].estimate();
    rep.level_estimates.push_back(fj);
    raw += fj * std::ldexp(1.0, -static_cast<int>(j));
  }
  rep.raw = raw;
  rep.bias_adjusted = (raw - 2.0) * t_ / (1.0 - 1.0 / std::exp(1.0));
  rep.live_space_words = live_words_;
  rep.peak_space_words = peak_words_;
  return rep;
}

std::pair<double, double> F0EntropyEstimator::raw_sum_window(double entropy_bits, double eps) {
  double t = (1.0 + eps) * (1.0 + eps);
  double lo = (1.0 - 1.0 / std::exp(1.0)) * (entropy_bits - 1.0) / t;
  double hi = (1.0 + eps) * (1.0 + eps) * entropy_bits / t + 2.0;
  return {lo, hi};
}

}  // namespace streamdist
