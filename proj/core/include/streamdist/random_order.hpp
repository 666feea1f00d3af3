#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "streamdist/rng.hpp"

namespace streamdist {

struct RandomOrderParams {
  uint64_t n = 0;
  double eps = 0.2;
  double c1 = 8.0;          // batch size multiplier: batches hold c1*log2(n) tokens
  double query_const = 48.0;  // queries t = ceil(query_const * eps^-2 * log2 n)
  uint64_t seed = 0;
  //! The whole scheme is only correct on a uniformly shuffled stream; the
  //! caller must assert that explicitly.
  bool input_random_order = false;
};

struct RandomOrderReport {
  double estimate = 0;  // bits
  bool exact_path = false;  // residual fit in memory, no sampling error
  uint64_t m = 0;
  uint64_t m_proj = 0;        // tokens outside the absorbed set
  double w = 0;               // m_proj / m
  uint64_t absorbed_items = 0;
  uint64_t absorption_rounds = 0;
  uint64_t queries = 0;  // simulated oracle calls (0 on the exact path)
  uint64_t live_space_words = 0;
  uint64_t peak_space_words = 0;
};

//! Single-pass entropy estimator for randomly ordered streams. Repeatedly
//! collects a batch of c1*log2(n) tokens outside the absorbed set A; a batch
//! dominated by one item (multiplicity >= half the batch) absorbs all its
//! distinct items into A, whose counts stay exact. The first undominated
//! batch ends absorption: the remaining suffix projected away from A then
//! carries entropy >= 1 whp, and a sampling estimator is simulated on it.
//! Because the stream is a random permutation, the tokens after the batch
//! are a without-replacement sample; answering the j-th draw with the next
//! unconsumed token with probability (m_proj - consumed)/m_proj and with a
//! uniformly chosen consumed token otherwise makes every draw exactly an
//! independent sample of the projection's empirical distribution. Exact
//! counts for the sampled items double as probe answers. The final answer
//! combines A and the projection by the grouping identity
//! H = sum_A (c/m) log2(m/c) + w log2(1/w) + w H_proj. Streams whose
//! projection suffix fits in the tail ring buffer are answered exactly.
class RandomOrderEstimator {
 public:
  explicit RandomOrderEstimator(const RandomOrderParams& params);

  void feed(uint64_t item);
  RandomOrderReport report();

  uint64_t tokens_fed() const { return m_; }
  uint64_t batch_size() const { return batch_target_; }
  uint64_t query_count() const { return t_; }

 private:
  enum class Phase { kAbsorb, kStream };

  RandomOrderParams params_;
  uint64_t batch_target_;
  double absorb_threshold_;
  uint64_t t_;
  SplitMix64 rng_;

  Phase phase_ = Phase::kAbsorb;
  uint64_t m_ = 0;
  uint64_t m_proj_ = 0;
  uint64_t absorption_rounds_ = 0;
  std::unordered_map<uint64_t, uint64_t> a_counts_;
  std::unordered_map<uint64_t, uint64_t> proj_counts_;  // batch and prefix items only
  std::vector<uint64_t> batch_;   // the undominated batch once kStream starts
  std::vector<uint64_t> prefix_;  // first t_ projection tokens after the batch
  std::vector<uint64_t> ring_;    // last ring_cap_ projection tokens after the batch
  uint64_t ring_cap_;
  uint64_t ring_next_ = 0;  // total pushed; ring_[i % cap] holds the live window
  uint64_t live_words_ = 0;
  uint64_t peak_words_ = 0;

  void note_space();
  double exact_projection_entropy() const;
  double simulated_projection_entropy(uint64_t* queries);
};

}  // namespace streamdist
