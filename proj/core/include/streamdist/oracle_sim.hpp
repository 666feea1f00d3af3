#pragma once

#include <cstdint>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "streamdist/oracle.hpp"
#include "streamdist/rng.hpp"
#include "streamdist/stream.hpp"

namespace streamdist {

struct StreamOracleParams {
  uint64_t t = 0;             // generative calls supported per target
  uint64_t extra_probes = 0;  // uniform probes outside the sampled set (one target only)
  uint64_t seed = 0;
};

//! Prefix slot that serves the j-th generative call (1-based) over a stream
//! of m tokens: slot j-1 (the next without-replacement token) when j <= m
//! and fresh_roll < m-j+1, else repeat_roll. With fresh_roll uniform below m
//! and repeat_roll uniform below max(1, min(j-1, m)) the served slot is j-1
//! with probability (m-j+1)/m and each earlier slot with probability 1/m,
//! which over a uniformly shuffled stream makes the served item sequence
//! i.i.d. from the stream's empirical distribution. Kept a pure function of
//! the two rolls so the law can be checked by exhaustive enumeration.
uint64_t one_pass_serve_slot(uint64_t call_index, uint64_t stream_len,
                             uint64_t fresh_roll, uint64_t repeat_roll);

//! Serves a sampling tester from one pass over a randomly ordered stream.
//! While feeding, it stores the first t tokens of each target (the prefix)
//! and exact counts for every item seen; once each target's prefix is full
//! the count table is pruned to the prefix items plus the extra probe
//! indices, so the retained state is O(t) words. Because the stream is a
//! random permutation, the prefix is a without-replacement sample, and the
//! j-th generative call is corrected to a with-replacement one: it returns
//! prefix[j] with probability (m-j+1)/m and a uniform earlier answer
//! otherwise. Probes answer count/m exactly, which requires the tester to
//! only probe items it sampled (or the declared extras), and at most t
//! generative calls per target; both are enforced.
class OnePassStreamOracle : public Oracle {
 public:
  OnePassStreamOracle(uint64_t n, bool two_targets, const StreamOracleParams& params);

  void feed(const StreamToken& tok);
  //! Ends the feeding phase; the oracle interface works afterwards.
  void finish();

  uint64_t base_size() const override { return n_; }
  bool has_two_targets() const override { return two_; }
  uint64_t sample(Target which) override;
  double probe(Target which, uint64_t i) override;

  uint64_t stream_len(Target which) const { return side(which).m; }
  uint64_t live_space_words() const;
  uint64_t peak_space_words() const { return peak_words_; }

 private:
  struct Side {
    std::vector<uint64_t> prefix;
    uint64_t m = 0;
    uint64_t calls = 0;
  };

  const Side& side(Target which) const { return which == Target::kP ? p_ : q_; }
  Side& side(Target which) { return which == Target::kP ? p_ : q_; }
  bool windows_full() const;
  void prune();

  uint64_t n_;
  bool two_;
  StreamOracleParams params_;
  Side p_, q_;
  // item -> (count under p, count under q); full until pruning
  std::unordered_map<uint64_t, std::pair<uint64_t, uint64_t>> counts_;
  bool pruned_ = false;
  bool serving_ = false;
  SplitMix64 rng_;
  uint64_t peak_words_ = 0;
};

//! Two-pass variant for replayable streams in arbitrary order. Pass one
//! runs t independent size-1 reservoir samplers per target, jumping between
//! replacement positions geometrically instead of flipping a coin per
//! token, and fixes the probe set; pass two counts the probe-set items
//! exactly. Generative calls replay the reservoir values in order.
class TwoPassStreamOracle : public Oracle {
 public:
  TwoPassStreamOracle(uint64_t n, bool two_targets, const StreamOracleParams& params);

  void pass1_feed(const StreamToken& tok);
  void pass1_end();
  void pass2_feed(const StreamToken& tok);
  void pass2_end();
  //! Drives both passes over the source, rewinding it in between.
  void consume(StreamSource& src);

  uint64_t base_size() const override { return n_; }
  bool has_two_targets() const override { return two_; }
  uint64_t sample(Target which) override;
  double probe(Target which, uint64_t i) override;

  uint64_t stream_len(Target which) const { return which == Target::kP ? p_.m : q_.m; }
  uint64_t live_space_words() const;

 private:
  struct Event {
    uint64_t pos;
    uint32_t slot;
    bool operator>(const Event& o) const { return pos > o.pos; }
  };
  struct Side {
    std::vector<uint64_t> values;  // one per reservoir slot
    std::vector<uint64_t> at;      // position the slot last considered
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> fires;
    uint64_t m = 0;
    uint64_t m2 = 0;
    uint64_t calls = 0;
  };

  Side& side(Target which) { return which == Target::kP ? p_ : q_; }
  uint64_t next_fire(uint64_t c);

  uint64_t n_;
  bool two_;
  StreamOracleParams params_;
  Side p_, q_;
  std::unordered_map<uint64_t, std::pair<uint64_t, uint64_t>> counts_;
  int phase_ = 1;  // 1, 2, then 3 = serving
  SplitMix64 rng_;
};

}  // namespace streamdist
