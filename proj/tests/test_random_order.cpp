#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "streamdist/alias_sampler.hpp"
#include "streamdist/errors.hpp"
#include "streamdist/random_order.hpp"
#include "streamdist/stream.hpp"

using namespace streamdist;

namespace {

RandomOrderParams make_params(uint64_t n, uint64_t seed) {
  RandomOrderParams p;
  p.n = n;
  p.seed = seed;
  p.input_random_order = true;
  return p;
}

struct FedResult {
  RandomOrderReport rep;
  double h_emp = 0;
};

FedResult feed_iid(RandomOrderEstimator& est, const Distribution& d, uint64_t m,
                   uint64_t stream_seed) {
  AliasSampler draw(d);
  SplitMix64 rng(stream_seed);
  std::vector<uint64_t> counts(d.n(), 0);
  for (uint64_t k = 0; k < m; ++k) {
    uint64_t item = draw.sample(rng);
    ++counts[item];
    est.feed(item);
  }
  return {est.report(), empirical_entropy_bits(counts, m)};
}

}  // namespace

TEST_SUITE("random_order") {

TEST_CASE("construction demands the random-order attestation") {
  RandomOrderParams p;
  p.n = 64;
  CHECK_THROWS_AS(RandomOrderEstimator{p}, ContractError);
  p.input_random_order = true;
  p.n = 1;
  CHECK_THROWS_AS(RandomOrderEstimator{p}, ContractError);
  p.n = 64;
  RandomOrderEstimator est(p);
  CHECK(est.batch_size() == 48);  // 8 * log2(64)
  CHECK_THROWS_AS(est.report(), ContractError);  // empty stream
}

TEST_CASE("a fully absorbed point-mass stream reports exactly zero") {
  RandomOrderEstimator est(make_params(64, 1));
  for (int k = 0; k < 4800; ++k) est.feed(9);  // 100 whole batches
  auto rep = est.report();
  CHECK(rep.estimate == 0.0);
  CHECK(rep.exact_path);
  CHECK(rep.m == 4800);
  CHECK(rep.m_proj == 0);
  // one absorption round: afterwards every token is an A-item and batches
  // never form again
  CHECK(rep.absorbed_items == 1);
  CHECK(rep.absorption_rounds == 1);
  CHECK(rep.queries == 0);
}

TEST_CASE("streams absorbed to the end are answered exactly") {
  std::vector<double> masses(64, 0.0);
  masses[0] = 0.95;
  masses[1] = 0.05;
  Distribution d(masses);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RandomOrderEstimator est(make_params(64, seed));
    auto [rep, h_emp] = feed_iid(est, d, 5000, 40 + seed);
    CHECK(rep.exact_path);
    CHECK(rep.queries == 0);
    CHECK(rep.absorbed_items == 2);
    CHECK(rep.estimate == doctest::Approx(h_emp).epsilon(1e-12));
  }
}

TEST_CASE("short projection suffixes are recounted exactly") {
  auto u = Distribution::uniform(64);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RandomOrderEstimator est(make_params(64, seed));
    auto [rep, h_emp] = feed_iid(est, u, 5000, 90 + seed);
    CHECK(rep.exact_path);
    CHECK(rep.absorbed_items == 0);
    CHECK(rep.w == 1.0);
    CHECK(rep.queries == 0);
    CHECK(rep.estimate == doctest::Approx(h_emp).epsilon(1e-12));
  }
}

TEST_CASE("long uniform streams are simulated within a loose window") {
  auto u = Distribution::uniform(64);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RandomOrderEstimator est(make_params(64, seed));
    auto [rep, h_emp] = feed_iid(est, u, 50000, 700 + seed);
    CHECK_FALSE(rep.exact_path);
    CHECK(rep.queries == est.query_count());
    CHECK(rep.w == 1.0);
    CHECK(std::fabs(rep.estimate - h_emp) <= 0.3 * h_emp);
  }
}

TEST_CASE("long skewed streams stay within the advertised factor") {
  auto z = Distribution::zipf(256, 1.0);
  int ok = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    RandomOrderEstimator est(make_params(256, seed));
    auto [rep, h_emp] = feed_iid(est, z, 60000, 7000 + seed);
    CHECK_FALSE(rep.exact_path);
    if (std::fabs(rep.estimate - h_emp) <= 0.25 * h_emp) ++ok;
  }
  CHECK(ok >= 8);
}

}  // TEST_SUITE
