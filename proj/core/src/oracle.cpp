#include "streamdist/oracle.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <unordered_set>

#include "streamdist/errors.hpp"

namespace streamdist {

std::string CallTrace::to_json(uint64_t seed) const {
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "{\"samples_p\":%" PRIu64 ",\"samples_q\":%" PRIu64
                ",\"probes_p\":%" PRIu64 ",\"probes_q\":%" PRIu64
                ",\"seed\":%" PRIu64 "}",
                samples_p, samples_q, probes_p, probes_q, seed);
  return buf;
}

void Oracle::charge() {
  if (budget_ && trace_.total() >= *budget_)
    throw ContractError("oracle: call budget exhausted");
}

void Oracle::count_sample(Target which) {
  charge();
  (which == Target::kP ? trace_.samples_p : trace_.samples_q)++;
}

void Oracle::count_probe(Target which) {
  charge();
  (which == Target::kP ? trace_.probes_p : trace_.probes_q)++;
}

OracleSession::OracleSession(Distribution p, uint64_t seed)
    : p_(std::move(p)), p_sampler_(p_), rng_(seed), seed_(seed) {}

OracleSession::OracleSession(Distribution p, Distribution q, uint64_t seed)
    : p_(std::move(p)), q_(std::move(q)), p_sampler_(p_), q_sampler_(*q_),
      rng_(seed), seed_(seed) {
  if (p_.n() != q_->n())
    throw ContractError("oracle: p and q must share one base size");
}

const Distribution& OracleSession::target(Target which) const {
  if (which == Target::kP) return p_;
  if (!q_) throw ContractError("oracle: session has no second distribution");
  return *q_;
}

uint64_t OracleSession::sample(Target which) {
  count_sample(which);
  if (which == Target::kP) return p_sampler_.sample(rng_);
  if (!q_sampler_) throw ContractError("oracle: session has no second distribution");
  return q_sampler_->sample(rng_);
}

double OracleSession::probe(Target which, uint64_t i) {
  if (i >= p_.n()) throw ContractError("oracle: probe index out of range");
  count_probe(which);
  return target(which)[i];
}

CanonicalPlan canonicalize(Oracle& oracle, Target which, uint64_t t,
                           uint64_t extra_probes, SplitMix64& rng) {
  if (t == 0) throw ContractError("canonicalize: need t >= 1");
  const uint64_t n = oracle.base_size();

  CanonicalPlan plan;
  plan.samples.reserve(t);
  std::unordered_set<uint64_t> seen;
  for (uint64_t k = 0; k < t; ++k) {
    uint64_t i = oracle.sample(which);
    plan.samples.push_back(i);
    if (seen.insert(i).second) plan.probe_items.push_back(i);
  }
  if (extra_probes > n - seen.size())
    throw ContractError("canonicalize: extra_probes exceed the unsampled part of [n]");
  // rejection against the sampled set; fine because extras are few
  uint64_t added = 0;
  while (added < extra_probes) {
    uint64_t i = rng.next_below(n);
    if (seen.insert(i).second) {
      plan.probe_items.push_back(i);
      ++added;
    }
  }
  for (uint64_t i : plan.probe_items) plan.probe_values[i] = oracle.probe(which, i);
  return plan;
}

PlanOracle::PlanOracle(const CanonicalPlan& plan, uint64_t base_size)
    : plan_(plan), n_(base_size) {}

uint64_t PlanOracle::sample(Target which) {
  (void)which;
  if (next_sample_ >= plan_.samples.size())
    throw ContractError("plan oracle: sample calls exceed the recorded plan");
  count_sample(Target::kP);
  return plan_.samples[next_sample_++];
}

double PlanOracle::probe(Target which, uint64_t i) {
  (void)which;
  auto it = plan_.probe_values.find(i);
  if (it == plan_.probe_values.end())
    throw ContractError("plan oracle: probe of an item outside the plan");
  count_probe(Target::kP);
  return it->second;
}

}  // namespace streamdist
