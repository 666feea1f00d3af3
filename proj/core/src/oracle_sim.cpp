#include "streamdist/oracle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "streamdist/errors.hpp"

namespace streamdist {

namespace {
constexpr uint64_t kServeTag = 0x73657276ULL;
constexpr uint64_t kReservoirTag = 0x72657376ULL;

//! Uniform indices from [n] minus the keys of `counts`, inserted into it.
template <typename Map>
void draw_extras(Map& counts, uint64_t n, uint64_t want, SplitMix64& rng) {
  if (want == 0) return;
  uint64_t outside = n - std::min<uint64_t>(n, counts.size());
  if (want > outside) throw ContractError("stream oracle: extra probes exceed unsampled items");
  uint64_t added = 0;
  while (added < want) {
    uint64_t i = rng.next_below(n);
    if (counts.emplace(i, std::make_pair(0ULL, 0ULL)).second) ++added;
  }
}
}  // namespace

uint64_t one_pass_serve_slot(uint64_t call_index, uint64_t stream_len,
                             uint64_t fresh_roll, uint64_t repeat_roll) {
  if (call_index <= stream_len && fresh_roll < stream_len - call_index + 1)
    return call_index - 1;
  return repeat_roll;
}

OnePassStreamOracle::OnePassStreamOracle(uint64_t n, bool two_targets,
                                         const StreamOracleParams& params)
    : n_(n), two_(two_targets), params_(params),
      rng_(mix64(params.seed ^ kServeTag)) {
  if (n_ == 0) throw ContractError("stream oracle: base size must be positive");
  if (params_.t == 0) throw ContractError("stream oracle: t must be positive");
  if (two_ && params_.extra_probes > 0)
    throw ContractError("stream oracle: extra probes need a single target");
  p_.prefix.reserve(params_.t);
  if (two_) q_.prefix.reserve(params_.t);
}

bool OnePassStreamOracle::windows_full() const {
  if (p_.prefix.size() < params_.t) return false;
  return !two_ || q_.prefix.size() >= params_.t;
}

void OnePassStreamOracle::prune() {
  std::unordered_set<uint64_t> keep(p_.prefix.begin(), p_.prefix.end());
  keep.insert(q_.prefix.begin(), q_.prefix.end());
  for (auto it = counts_.begin(); it != counts_.end();) {
    if (keep.count(it->first)) ++it; else it = counts_.erase(it);
  }
  draw_extras(counts_, n_, params_.extra_probes, rng_);
  pruned_ = true;
}

void OnePassStreamOracle::feed(const StreamToken& tok) {
  if (serving_) throw ContractError("stream oracle: feed after finish");
  if (tok.dist == Target::kQ && !two_) throw ContractError("stream oracle: unexpected q token");
  if (tok.item >= n_) throw ContractError("stream oracle: item outside the base set");

  Side& s = side(tok.dist);
  ++s.m;
  bool was_full = windows_full();
  if (s.prefix.size() < params_.t) s.prefix.push_back(tok.item);

  if (!pruned_) {
    auto it = counts_.try_emplace(tok.item, 0ULL, 0ULL).first;
    (tok.dist == Target::kP ? it->second.first : it->second.second) += 1;
    peak_words_ = std::max(peak_words_, live_space_words());
    if (!was_full && windows_full()) prune();
  } else if (auto it = counts_.find(tok.item); it != counts_.end()) {
    (tok.dist == Target::kP ? it->second.first : it->second.second) += 1;
  }
}

void OnePassStreamOracle::finish() {
  if (serving_) return;
  if (!pruned_) {
    // Short stream: the prefixes hold it entirely, nothing to discard.
    draw_extras(counts_, n_, params_.extra_probes, rng_);
    pruned_ = true;
  }
  peak_words_ = std::max(peak_words_, live_space_words());
  serving_ = true;
}

uint64_t OnePassStreamOracle::sample(Target which) {
  if (!serving_) throw ContractError("stream oracle: sample before finish");
  if (which == Target::kQ && !two_) throw ContractError("stream oracle: no q target");
  Side& s = side(which);
  if (s.m == 0) throw ContractError("stream oracle: sample from an empty target");
  if (s.calls >= params_.t) throw ContractError("stream oracle: generative budget exhausted");
  count_sample(which);
  uint64_t j = ++s.calls;

  // prefix[j-1] is the j-th without-replacement draw; mixing in earlier
  // answers with the complementary weight makes the draw with-replacement.
  uint64_t back = std::max<uint64_t>(1, std::min<uint64_t>(j - 1, s.m));
  uint64_t fresh_roll = rng_.next_below(s.m);
  uint64_t repeat_roll = rng_.next_below(back);
  return s.prefix[one_pass_serve_slot(j, s.m, fresh_roll, repeat_roll)];
}

double OnePassStreamOracle::probe(Target which, uint64_t i) {
  if (!serving_) throw ContractError("stream oracle: probe before finish");
  if (which == Target::kQ && !two_) throw ContractError("stream oracle: no q target");
  if (i >= n_) throw ContractError("stream oracle: probe outside the base set");
  const Side& s = side(which);
  if (s.m == 0) throw ContractError("stream oracle: probe of an empty target");
  auto it = counts_.find(i);
  if (it == counts_.end())
    throw ContractError("stream oracle: probe of an index outside counted sets");
  count_probe(which);
  uint64_t c = which == Target::kP ? it->second.first : it->second.second;
  return static_cast<double>(c) / static_cast<double>(s.m);
}

uint64_t OnePassStreamOracle::live_space_words() const {
  return p_.prefix.size() + q_.prefix.size() + 3 * counts_.size();
}

TwoPassStreamOracle::TwoPassStreamOracle(uint64_t n, bool two_targets,
                                         const StreamOracleParams& params)
    : n_(n), two_(two_targets), params_(params),
      rng_(mix64(params.seed ^ kReservoirTag)) {
  if (n_ == 0) throw ContractError("stream oracle: base size must be positive");
  if (params_.t == 0) throw ContractError("stream oracle: t must be positive");
  if (two_ && params_.extra_probes > 0)
    throw ContractError("stream oracle: extra probes need a single target");
  for (Side* s : {&p_, &q_}) {
    s->values.assign(params_.t, 0);
    s->at.assign(params_.t, 0);
    for (uint32_t slot = 0; slot < params_.t; ++slot) s->fires.push({1, slot});
  }
}

uint64_t TwoPassStreamOracle::next_fire(uint64_t c) {
  // P(slot keeps its value through position x) = c/x, so the next
  // replacement position is distributed as floor(c/U) + 1.
  double u;
  do { u = rng_.next_unit(); } while (u == 0.0);
  double next = std::floor(static_cast<double>(c) / u) + 1.0;
  if (next > 9e18) return UINT64_MAX;
  return static_cast<uint64_t>(next);
}

void TwoPassStreamOracle::pass1_feed(const StreamToken& tok) {
  if (phase_ != 1) throw ContractError("stream oracle: pass 1 is over");
  if (tok.dist == Target::kQ && !two_) throw ContractError("stream oracle: unexpected q token");
  if (tok.item >= n_) throw ContractError("stream oracle: item outside the base set");
  Side& s = side(tok.dist);
  uint64_t pos = ++s.m;
  while (!s.fires.empty() && s.fires.top().pos == pos) {
    uint32_t slot = s.fires.top().slot;
    s.fires.pop();
    s.values[slot] = tok.item;
    s.at[slot] = pos;
    s.fires.push({next_fire(pos), slot});
  }
}

void TwoPassStreamOracle::pass1_end() {
  if (phase_ != 1) throw ContractError("stream oracle: pass 1 is over");
  phase_ = 2;
  for (Side* s : {&p_, &q_}) {
    if (s->m == 0) continue;
    for (uint64_t v : s->values) counts_.emplace(v, std::make_pair(0ULL, 0ULL));
  }
  draw_extras(counts_, n_, params_.extra_probes, rng_);
}

void TwoPassStreamOracle::pass2_feed(const StreamToken& tok) {
  if (phase_ != 2) throw ContractError("stream oracle: not in pass 2");
  if (tok.item >= n_) throw ContractError("stream oracle: item outside the base set");
  Side& s = side(tok.dist);
  ++s.m2;
  if (auto it = counts_.find(tok.item); it != counts_.end())
    (tok.dist == Target::kP ? it->second.first : it->second.second) += 1;
}

void TwoPassStreamOracle::pass2_end() {
  if (phase_ != 2) throw ContractError("stream oracle: not in pass 2");
  if (p_.m2 != p_.m || q_.m2 != q_.m)
    throw ContractError("stream oracle: second pass saw a different stream");
  phase_ = 3;
}

void TwoPassStreamOracle::consume(StreamSource& src) {
  if (!src.replayable()) throw ContractError("stream oracle: two passes need a replayable source");
  StreamToken tok;
  while (src.next(tok)) pass1_feed(tok);
  pass1_end();
  src.rewind();
  while (src.next(tok)) pass2_feed(tok);
  pass2_end();
}

uint64_t TwoPassStreamOracle::sample(Target which) {
  if (phase_ != 3) throw ContractError("stream oracle: sample before both passes");
  if (which == Target::kQ && !two_) throw ContractError("stream oracle: no q target");
  Side& s = side(which);
  if (s.m == 0) throw ContractError("stream oracle: sample from an empty target");
  if (s.calls >= params_.t) throw ContractError("stream oracle: generative budget exhausted");
  count_sample(which);
  return s.values[s.calls++];
}

double TwoPassStreamOracle::probe(Target which, uint64_t i) {
  if (phase_ != 3) throw ContractError("stream oracle: probe before both passes");
  if (which == Target::kQ && !two_) throw ContractError("stream oracle: no q target");
  if (i >= n_) throw ContractError("stream oracle: probe outside the base set");
  Side& s = side(which);
  if (s.m == 0) throw ContractError("stream oracle: probe of an empty target");
  auto it = counts_.find(i);
  if (it == counts_.end())
    throw ContractError("stream oracle: probe of an index outside counted sets");
  count_probe(which);
  uint64_t c = which == Target::kP ? it->second.first : it->second.second;
  return static_cast<double>(c) / static_cast<double>(s.m);
}

uint64_t TwoPassStreamOracle::live_space_words() const {
  uint64_t words = 3 * counts_.size();
  for (const Side* s : {&p_, &q_}) words += s->values.size() + s->at.size();
  return words;
}

}  // namespace streamdist
