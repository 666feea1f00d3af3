#include <set>
#include <vector>

#include "doctest.h"
#include "streamdist/errors.hpp"
#include "streamdist/oracle.hpp"
#include "streamdist/testers.hpp"

using namespace streamdist;

TEST_SUITE("oracle") {

TEST_CASE("sessions replay identically per seed") {
  auto p = Distribution::zipf(32, 1.0);
  OracleSession a(p, 2024), b(p, 2024), c(p, 2025);
  bool same = true, diff = false;
  for (int i = 0; i < 200; ++i) {
    uint64_t x = a.sample(Target::kP);
    same &= x == b.sample(Target::kP);
    diff |= x != c.sample(Target::kP);
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("probes return the exact stored mass") {
  auto p = Distribution::dyadic(8);
  auto q = Distribution::uniform(8);
  OracleSession s(p, q, 1);
  CHECK(s.has_two_targets());
  CHECK(s.base_size() == 8);
  CHECK(s.probe(Target::kP, 0) == 0.5);
  CHECK(s.probe(Target::kQ, 0) == 0.125);
  CHECK_THROWS_AS(s.probe(Target::kP, 8), ContractError);
  OracleSession single(p, 1);
  CHECK_FALSE(single.has_two_targets());
  CHECK_THROWS_AS(single.sample(Target::kQ), ContractError);
}

TEST_CASE("trace counts every call and the budget cuts them off") {
  auto p = Distribution::uniform(16);
  OracleSession s(p, p, 3);
  s.sample(Target::kP);
  s.sample(Target::kQ);
  s.probe(Target::kP, 3);
  CHECK(s.trace().samples_p == 1);
  CHECK(s.trace().samples_q == 1);
  CHECK(s.trace().probes_p == 1);
  CHECK(s.trace().total() == 3);
  CHECK(s.trace().to_json(3).find("samples_p") != std::string::npos);

  s.set_budget(5);
  s.sample(Target::kP);
  s.sample(Target::kP);
  CHECK_THROWS_AS(s.sample(Target::kP), ContractError);
}

TEST_CASE("canonical plans hold the samples, their probes, and the extras") {
  auto p = Distribution::zipf(24, 1.0);
  OracleSession s(p, 7);
  SplitMix64 rng(99);
  auto plan = canonicalize(s, Target::kP, 60, 5, rng);
  CHECK(plan.samples.size() == 60);

  std::set<uint64_t> sampled(plan.samples.begin(), plan.samples.end());
  std::set<uint64_t> probed(plan.probe_items.begin(), plan.probe_items.end());
  CHECK(probed.size() == plan.probe_items.size());  // distinct
  CHECK(plan.probe_items.size() == sampled.size() + 5);
  for (uint64_t item : sampled) CHECK(probed.count(item) == 1);
  for (uint64_t item : plan.probe_items) {
    REQUIRE(plan.probe_values.count(item) == 1);
    CHECK(plan.probe_values.at(item) == p[item]);
  }
  // extras land outside the sampled set
  size_t extras_checked = 0;
  for (size_t i = sampled.size(); i < plan.probe_items.size(); ++i) {
    CHECK(sampled.count(plan.probe_items[i]) == 0);
    ++extras_checked;
  }
  CHECK(extras_checked == 5);
}

TEST_CASE("canonicalize rejects impossible extra counts") {
  auto p = Distribution::uniform(4);
  OracleSession s(p, 7);
  SplitMix64 rng(1);
  CHECK_THROWS_AS(canonicalize(s, Target::kP, 50, 4, rng), ContractError);
  CHECK_THROWS_AS(canonicalize(s, Target::kP, 0, 0, rng), ContractError);
}

TEST_CASE("replaying a plan gives byte-identical estimates") {
  auto p = Distribution::zipf(64, 1.0);
  CombinedParams prm;
  prm.m_override = 400;

  OracleSession direct(p, 31337);
  auto direct_est = combined_entropy_estimate(direct, prm);

  OracleSession recorded(p, 31337);
  SplitMix64 rng(5);
  auto plan = canonicalize(recorded, Target::kP, 400, 0, rng);
  PlanOracle replay(plan, p.n());
  auto replay_est = combined_entropy_estimate(replay, prm);

  CHECK(replay_est.estimate == direct_est.estimate);
  CHECK(replay_est.iterations == direct_est.iterations);
}

TEST_CASE("plans refuse calls beyond what they recorded") {
  auto p = Distribution::uniform(8);
  OracleSession s(p, 3);
  SplitMix64 rng(4);
  auto plan = canonicalize(s, Target::kP, 5, 0, rng);
  PlanOracle replay(plan, p.n());
  for (int i = 0; i < 5; ++i) replay.sample(Target::kP);
  CHECK_THROWS_AS(replay.sample(Target::kP), ContractError);
  uint64_t missing = 0;
  while (plan.probe_values.count(missing)) ++missing;
  CHECK_THROWS_AS(replay.probe(Target::kP, missing), ContractError);
}

}  // TEST_SUITE
