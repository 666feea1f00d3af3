#include "streamdist/random_order.hpp"

#include <algorithm>
#include <cmath>

#include "streamdist/errors.hpp"

namespace streamdist {

RandomOrderEstimator::RandomOrderEstimator(const RandomOrderParams& params)
    : params_(params), rng_(mix64(params.seed ^ 0x726f7074ULL)) {
  if (params_.n < 2) throw ContractError("random-order: base size must be at least 2");
  if (!(params_.eps > 0.0) || params_.eps >= 1.0)
    throw ContractError("random-order: eps must be in (0,1)");
  if (!(params_.c1 >= 1.0)) throw ContractError("random-order: c1 must be at least 1");
  if (!params_.input_random_order)
    throw ContractError("random-order: input not flagged as random-order");
  double logn = std::log2(static_cast<double>(params_.n));
  batch_target_ = static_cast<uint64_t>(std::ceil(params_.c1 * logn));
  absorb_threshold_ = 0.5 * params_.c1 * logn;
  t_ = static_cast<uint64_t>(std::ceil(params_.query_const * logn / (params_.eps * params_.eps)));
  ring_cap_ = 2 * t_;
  batch_.reserve(batch_target_);
}

void RandomOrderEstimator::note_space() {
  uint64_t words = 2 * a_counts_.size() + 2 * proj_counts_.size() + batch_.size() +
                   prefix_.size() + std::min<uint64_t>(ring_next_, ring_cap_);
  live_words_ = words;
  if (words > peak_words_) peak_words_ = words;
}

void RandomOrderEstimator::feed(uint64_t item) {
  ++m_;
  if (auto it = a_counts_.find(item); it != a_counts_.end()) {
    ++it->second;
    return;
  }
  ++m_proj_;

  if (phase_ == Phase::kAbsorb) {
    batch_.push_back(item);
    ++proj_counts_[item];
    if (batch_.size() < batch_target_) return;

    uint64_t max_mult = 0;
    for (uint64_t x : batch_) max_mult = std::max(max_mult, proj_counts_[x]);
    if (static_cast<double>(max_mult) >= absorb_threshold_) {
      // All occurrences of the batch items live in this batch: earlier
      // batches were fully absorbed, so their items never reach a later one.
      for (uint64_t x : batch_) {
        auto it = proj_counts_.find(x);
        if (it == proj_counts_.end()) continue;
        a_counts_.emplace(x, it->second);
        proj_counts_.erase(it);
      }
      m_proj_ -= batch_.size();
      batch_.clear();
      ++absorption_rounds_;
    } else {
      phase_ = Phase::kStream;
      prefix_.reserve(t_);
      ring_.reserve(std::min<uint64_t>(ring_cap_, 1 << 16));
    }
    note_space();
    return;
  }

  if (prefix_.size() < t_) {
    // The prefix is the literal first t_ projection tokens after the batch;
    // the simulation reveals them in this order. While it has room no token
    // is ever skipped, so a count started here is the item's true first
    // occurrence and stays exact.
    prefix_.push_back(item);
    ++proj_counts_[item];
  } else if (auto it = proj_counts_.find(item); it != proj_counts_.end()) {
    ++it->second;
  }
  if (ring_next_ < ring_cap_) {
    if (ring_.size() <= ring_next_) ring_.resize(ring_next_ + 1);
    ring_[ring_next_] = item;
  } else {
    ring_[ring_next_ % ring_cap_] = item;
  }
  ++ring_next_;
  if ((m_ & 0x3ff) == 0) note_space();
}

double RandomOrderEstimator::exact_projection_entropy() const {
  std::unordered_map<uint64_t, uint64_t> counts;
  for (uint64_t x : batch_) ++counts[x];
  for (uint64_t i = 0; i < ring_next_; ++i) ++counts[ring_[i]];
  double mp = static_cast<double>(m_proj_);
  double h = 0.0;
  for (const auto& [item, c] : counts) {
    if (c == m_proj_) continue;
    h += (static_cast<double>(c) / mp) * std::log2(mp / static_cast<double>(c));
  }
  return h;
}

double RandomOrderEstimator::simulated_projection_entropy(uint64_t* queries) {
  uint64_t n_proj = params_.n - a_counts_.size();
  if (n_proj <= 1) return 0.0;
  double cutoff = std::pow(static_cast<double>(n_proj), -3.0);
  double mp = static_cast<double>(m_proj_);

  std::vector<uint64_t> consumed = batch_;  // tokens already revealed, in order
  consumed.reserve(batch_.size() + t_);
  uint64_t next_prefix = 0;
  double raw = 0.0;
  for (uint64_t q = 0; q < t_; ++q) {
    uint64_t revealed = consumed.size();
    uint64_t x;
    bool fresh = revealed < m_proj_ &&
                 rng_.next_unit() < (mp - static_cast<double>(revealed)) / mp;
    if (fresh) {
      x = prefix_[next_prefix++];
      consumed.push_back(x);
    } else {
      x = consumed[rng_.next_below(consumed.size())];
    }
    double mass = static_cast<double>(proj_counts_.at(x)) / mp;
    if (mass >= cutoff) raw += std::log2(1.0 / mass);
  }
  *queries = t_;
  return raw / static_cast<double>(t_);
}

RandomOrderReport RandomOrderEstimator::report() {
  if (m_ == 0) throw ContractError("random-order: empty stream");
  note_space();

  RandomOrderReport rep;
  rep.m = m_;
  rep.m_proj = m_proj_;
  rep.absorbed_items = a_counts_.size();
  rep.absorption_rounds = absorption_rounds_;
  rep.live_space_words = live_words_;

  double m = static_cast<double>(m_);
  double a_part = 0.0;
  for (const auto& [item, c] : a_counts_) {
    if (c == m_) continue;
    a_part += (static_cast<double>(c) / m) * std::log2(m / static_cast<double>(c));
  }

  if (m_proj_ == 0) {
    rep.estimate = a_part;
    rep.exact_path = true;
    rep.peak_space_words = peak_words_;
    return rep;
  }

  double w = static_cast<double>(m_proj_) / m;
  rep.w = w;
  double h_proj;
  if (phase_ == Phase::kAbsorb || ring_next_ <= ring_cap_) {
    // Every projection token is still in memory (a partial batch, or a
    // suffix short enough for the ring): no need to simulate anything.
    h_proj = exact_projection_entropy();
    rep.exact_path = true;
  } else {
    peak_words_ = std::max(peak_words_, live_words_ + batch_.size() + t_);
    h_proj = simulated_projection_entropy(&rep.queries);
  }
  rep.estimate = a_part + (w < 1.0 ? w * std::log2(1.0 / w) : 0.0) + w * h_proj;
  rep.peak_space_words = peak_words_;
  return rep;
}

}  // namespace streamdist
