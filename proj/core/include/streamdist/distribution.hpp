#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streamdist/rng.hpp"

namespace streamdist {

//! Probability vectors must sum to 1 within this absolute tolerance.
inline constexpr double kProbSumTol = 1e-9;

//! Explicit probability vector over the base [0, n). Immutable after
//! construction; ground truth for every oracle and estimator in the project.
class Distribution {
 public:
  //! Validates non-negativity and the sum-to-1 invariant.
  explicit Distribution(std::vector<double> probs);

  uint64_t n() const { return static_cast<uint64_t>(probs_.size()); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](uint64_t i) const { return probs_[i]; }

  static Distribution uniform(uint64_t n);
  //! Uniform over [lo, hi) embedded in a base of size n; mass 0 elsewhere.
  static Distribution uniform_on(uint64_t n, uint64_t lo, uint64_t hi);
  static Distribution point_mass(uint64_t n, uint64_t item);
  //! p_i = 2^-(i+1) with the last item absorbing the remainder, so the
  //! vector sums to 1 exactly.
  static Distribution dyadic(uint64_t n);
  //! p_i proportional to 1/(i+1)^s.
  static Distribution zipf(uint64_t n, double s);
  //! head_mass spread uniformly over the first half, the rest over the
  //! second half.
  static Distribution two_block(uint64_t n, double head_mass);
  //! Uniform draw from the probability simplex (normalized exponentials).
  static Distribution random_simplex(uint64_t n, SplitMix64& rng);

  //! Reads the text format: header `#n=<n>`, then `<i>\t<p_i>` lines,
  //! omitted indices meaning 0. Rejects files violating the invariants.
  static Distribution load(const std::string& path);
  //! Writes the same format, skipping zero entries.
  void save(const std::string& path) const;

 private:
  std::vector<double> probs_;
};

}  // namespace streamdist
