#include "streamdist/large_small.hpp"

#include <algorithm>
#include <cmath>

#include "streamdist/errors.hpp"

namespace streamdist {

LargeSmallEstimator::LargeSmallEstimator(const LargeSmallParams& params)
    : params_(params), rng_(mix64(params.seed ^ 0x747261636bULL)) {
  if (params_.n <= 3) throw ContractError("large-small: base size must exceed 3");
  if (params_.max_len == 0) throw ContractError("large-small: max_len must be positive");
  if (!(params_.alpha > 0.0) || params_.alpha >= 1.0)
    throw ContractError("large-small: alpha must be in (0,1)");
  if (!(params_.eps > 0.0) || params_.eps >= 1.0)
    throw ContractError("large-small: eps must be in (0,1)");
  if (!(params_.track_const > 0.0)) throw ContractError("large-small: track_const must be positive");

  double n = static_cast<double>(params_.n);
  double rate = params_.track_const * std::pow(n, params_.alpha) * std::log2(n) / params_.eps;
  cap_ = static_cast<uint64_t>(std::ceil(4.0 * rate)) + 64;

  double guess = 1.0;
  while (true) {
    Rung rung;
    rung.guess = guess;
    rung.track_prob = std::min(1.0, rate / guess);
    rungs_.push_back(std::move(rung));
    if (2.0 * guess >= static_cast<double>(params_.max_len)) break;
    guess *= 2.0;
  }
}

void LargeSmallEstimator::feed(uint64_t item) {
  if (m_ >= params_.max_len) throw ContractError("large-small: stream exceeds max_len");
  ++m_;
  double m = static_cast<double>(m_);
  while (first_live_ < rungs_.size() && m > 2.0 * rungs_[first_live_].guess) {
    Rung& rung = rungs_[first_live_];
    live_words_ -= 2 * rung.counts.size();
    rung.counts = {};
    rung.live = false;
    ++first_live_;
  }
  for (size_t r = first_live_; r < rungs_.size(); ++r) {
    Rung& rung = rungs_[r];
    auto it = rung.counts.find(item);
    if (it != rung.counts.end()) {
      ++it->second;
      continue;
    }
    if (rung.track_prob < 1.0 && !(rng_.next_unit() < rung.track_prob)) continue;
    if (rung.counts.size() >= cap_) {
      ++cap_hits_;
      continue;
    }
    rung.counts.emplace(item, 1);
    live_words_ += 2;
  }
  if (live_words_ > peak_words_) peak_words_ = live_words_;
}

uint64_t LargeSmallEstimator::chosen_rung() const {
  if (m_ == 0) throw ContractError("large-small: empty stream");
  // The first live rung satisfies guess <= m <= 2 * guess: its predecessor
  // died only once m exceeded twice its guess, which equals this guess.
  return first_live_;
}

const std::unordered_map<uint64_t, uint64_t>& LargeSmallEstimator::rung_counts(uint64_t i) const {
  if (i >= rungs_.size() || !rungs_[i].live)
    throw ContractError("large-small: rung is not live");
  return rungs_[i].counts;
}

LargeSmallReport LargeSmallEstimator::report() const {
  uint64_t chosen = chosen_rung();
  const Rung& rung = rungs_[chosen];
  double m = static_cast<double>(m_);
  double heavy_count = m * std::pow(static_cast<double>(params_.n), -params_.alpha);

  LargeSmallReport rep;
  rep.m = m_;
  rep.chosen_rung = chosen;
  rep.tracked_items = rung.counts.size();
  rep.cap_hits = cap_hits_;
  rep.live_space_words = live_words_;
  rep.peak_space_words = peak_words_;

  uint64_t heavy_mass = 0;
  double h_sum = 0.0;
  for (const auto& [item, c] : rung.counts) {
    if (static_cast<double>(c) < heavy_count) continue;
    ++rep.heavy_items;
    heavy_mass += c;
    if (c < m_) h_sum += (static_cast<double>(c) / m) * std::log2(m / static_cast<double>(c));
  }
  double w_hat = static_cast<double>(m_ - heavy_mass) / m;
  rep.w_hat = w_hat;
  double west = 0.0;
  if (w_hat > 0.0) west = w_hat * std::log2(static_cast<double>(params_.n) / w_hat);
  rep.estimate = west + h_sum;
  return rep;
}

LargeSmallBound large_small_error_bound(double alpha, double eps, uint64_t n) {
  if (!(alpha > 0.0) || alpha >= 1.0) throw ContractError("error bound: alpha must be in (0,1)");
  if (!(eps > 0.0) || eps >= 1.0) throw ContractError("error bound: eps must be in (0,1)");
  if (n < 2) throw ContractError("error bound: base size must be at least 2");
  double nn = static_cast<double>(n);
  LargeSmallBound b;
  b.factor = (1.0 / alpha) * (1.0 + std::log2(1.0 / eps) / std::log2(nn));
  b.additive = eps * (std::log2(nn / eps) + std::pow(nn, -alpha));
  return b;
}

double large_small_relative_error(double alpha, double eps, uint64_t n, double entropy_bits) {
  if (!(entropy_bits > 0.0)) throw ContractError("relative error: entropy must be positive");
  if (!(alpha > 0.0) || alpha >= 1.0) throw ContractError("relative error: alpha must be in (0,1)");
  if (!(eps > 0.0) || eps >= 1.0) throw ContractError("relative error: eps must be in (0,1)");
  double nn = static_cast<double>(n);
  return alpha * (eps * std::log2(nn / eps) + std::pow(nn, -alpha)) / entropy_bits +
         std::log2(1.0 / eps) / std::log2(nn);
}

double large_small_invert(double alpha, uint64_t n, double entropy_bits, double target) {
  auto f = [&](double e) { return large_small_relative_error(alpha, e, n, entropy_bits); };
  constexpr double kLo = 1e-12;
  constexpr double kHi = 1.0 - 1e-12;

  // Ternary search for the valley; f decreases from +inf then rises.
  double lo = kLo, hi = kHi;
  for (int iter = 0; iter < 200; ++iter) {
    double a = lo + (hi - lo) / 3.0;
    double b = hi - (hi - lo) / 3.0;
    if (f(a) < f(b)) hi = b; else lo = a;
  }
  double argmin = 0.5 * (lo + hi);
  double fmin = f(argmin);
  if (target < fmin) throw ContractError("invert: target accuracy below the achievable minimum");

  if (target <= f(kHi)) {
    lo = argmin;  // rising branch, f(lo) <= target <= f(hi)
    hi = kHi;
  } else if (target <= f(kLo)) {
    lo = kLo;  // falling branch only: f(lo) >= target >= f(hi)
    hi = argmin;
  } else {
    throw ContractError("invert: no solution in (0,1)");
  }
  bool rising = f(hi) >= f(lo);
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    bool above = f(mid) > target;
    if (above == rising) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace streamdist
