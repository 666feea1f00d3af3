#pragma once

#include <cstdint>
#include <vector>

#include "streamdist/distribution.hpp"
#include "streamdist/rng.hpp"

namespace streamdist {

//! Walker/Vose alias table: O(n) build, O(1) exact draws. Built once per
//! Distribution because the harness draws millions of samples per run.
class AliasSampler {
 public:
  explicit AliasSampler(const Distribution& dist);

  //! Returns i with probability p_i. Consumes exactly two RNG outputs.
  uint64_t sample(SplitMix64& rng) const {
    uint64_t col = rng.next_below(prob_.size());
    return rng.next_unit() < prob_[col] ? col : alias_[col];
  }

  uint64_t n() const { return prob_.size(); }

 private:
  std::vector<double> prob_;    // acceptance threshold per column
  std::vector<uint64_t> alias_; // fallback item per column
};

}  // namespace streamdist
