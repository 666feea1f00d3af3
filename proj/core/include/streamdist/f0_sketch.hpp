#pragma once

#include <cstdint>
#include <vector>

#include "streamdist/rng.hpp"

namespace streamdist {

//! k-minimum-values distinct-count sketch: keeps the k smallest hash values
//! per repetition and estimates F0 as (k-1)/h_(k), exact below k distinct.
//! Repetitions with independent hashes are combined by median to reach
//! failure probability delta. State size is O(k log(1/delta)) words and
//! independent of the stream length.
class F0Sketch {
 public:
  F0Sketch(double eps0, double delta, uint64_t hash_seed);

  //! Returns how many stored words the summary grew by (0..repetitions).
  uint64_t insert(uint64_t item);
  double estimate() const;

  //! Stored hash values across repetitions.
  uint64_t space_words() const { return stored_; }
  uint64_t k() const { return k_; }
  uint64_t repetitions() const { return static_cast<uint64_t>(reps_.size()); }

  static uint64_t k_for(double eps0);
  static uint64_t reps_for(double delta);

 private:
  //! Hashes below the acceptance bound collect unsorted in buf; when buf
  //! reaches 2k the k smallest are kept and the bound tightens to the k-th
  //! smallest seen, so each accepted hash costs amortized constant work and
  //! the k minima are preserved exactly. The table is flat linear probing
  //! (0 means empty) deduplicating buf's contents; values discarded by a
  //! compaction sit at or above the bound and never reach the table again,
  //! so it needs no deletions, only a rebuild from buf.
  struct Rep {
    std::vector<uint64_t> buf;    // accepted hashes, unsorted
    std::vector<uint64_t> table;  // power-of-two membership table
    uint64_t table_used = 0;
  };

  void rep_compact(uint64_t r);
  static void rep_table_refill(Rep& rep, uint64_t slots);

  uint64_t k_;
  uint64_t seed_;
  uint64_t stored_ = 0;
  std::vector<Rep> reps_;
  //! bounds_[r] is the k-th smallest hash seen by repetition r as of its
  //! last compaction, all-ones before. One contiguous block so the common
  //! reject path reads nothing from the Rep objects.
  std::vector<uint64_t> bounds_;
};

}  // namespace streamdist
