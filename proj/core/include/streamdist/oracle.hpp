#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamdist/alias_sampler.hpp"
#include "streamdist/distribution.hpp"
#include "streamdist/rng.hpp"

namespace streamdist {

//! Which of the (at most two) distributions a call addresses.
enum class Target { kP, kQ };

//! Per-target counts of sample and probe calls; the unit of cost every
//! sublinear bound in this project is stated in.
struct CallTrace {
  uint64_t samples_p = 0;
  uint64_t samples_q = 0;
  uint64_t probes_p = 0;
  uint64_t probes_q = 0;

  uint64_t total() const { return samples_p + samples_q + probes_p + probes_q; }
  std::string to_json(uint64_t seed) const;
};

//! Sample/probe access to one or two distributions. Implemented by the
//! exact in-memory session below and by the stream-backed simulators, so
//! every tester runs unchanged against either.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual uint64_t base_size() const = 0;
  virtual bool has_two_targets() const = 0;
  //! Returns i with probability exactly p_i (respectively q_i).
  virtual uint64_t sample(Target which) = 0;
  //! Returns the exact mass of item i under the target.
  virtual double probe(Target which, uint64_t i) = 0;

  const CallTrace& trace() const { return trace_; }
  //! Caps trace().total(); further calls raise ContractError.
  void set_budget(uint64_t max_total_calls) { budget_ = max_total_calls; }

 protected:
  void count_sample(Target which);
  void count_probe(Target which);

 private:
  void charge();
  CallTrace trace_;
  std::optional<uint64_t> budget_;
};

//! Ground-truth oracle over explicit Distributions, with alias-method
//! sampling and a seeded counter-based RNG: identical (seed, call sequence)
//! pairs yield identical outcomes.
class OracleSession : public Oracle {
 public:
  OracleSession(Distribution p, uint64_t seed);
  OracleSession(Distribution p, Distribution q, uint64_t seed);

  uint64_t base_size() const override { return p_.n(); }
  bool has_two_targets() const override { return q_.has_value(); }
  uint64_t sample(Target which) override;
  double probe(Target which, uint64_t i) override;

  uint64_t seed() const { return seed_; }
  const Distribution& target(Target which) const;

 private:
  Distribution p_;
  std::optional<Distribution> q_;
  AliasSampler p_sampler_;
  std::optional<AliasSampler> q_sampler_;
  SplitMix64 rng_;
  uint64_t seed_;
};

//! Realization of the canonical-form discipline: all samples drawn up
//! front, then probes of the distinct sampled indices, then optional
//! uniform probes of unsampled indices. Total calls <= 2t + extra_probes.
struct CanonicalPlan {
  std::vector<uint64_t> samples;                    // in draw order
  std::vector<uint64_t> probe_items;                // distinct sampled, then extras
  std::unordered_map<uint64_t, double> probe_values;
};

//! Executes the canonical discipline against one target. extra_probes are
//! drawn uniformly without replacement from the unsampled part of [n].
CanonicalPlan canonicalize(Oracle& oracle, Target which, uint64_t t,
                           uint64_t extra_probes, SplitMix64& rng);

//! Replays a CanonicalPlan as an Oracle: sample() walks the recorded draws,
//! probe() answers from the recorded values. Lets a sampling estimator run
//! unmodified on top of a pre-executed plan.
class PlanOracle : public Oracle {
 public:
  PlanOracle(const CanonicalPlan& plan, uint64_t base_size);

  uint64_t base_size() const override { return n_; }
  bool has_two_targets() const override { return false; }
  uint64_t sample(Target which) override;
  double probe(Target which, uint64_t i) override;

 private:
  const CanonicalPlan& plan_;
  uint64_t n_;
  uint64_t next_sample_ = 0;
};

}  // namespace streamdist
