#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "streamdist/alias_sampler.hpp"
#include "streamdist/distribution.hpp"
#include "streamdist/rng.hpp"

using namespace streamdist;

TEST_SUITE("rng_alias") {

TEST_CASE("generator is deterministic per seed") {
  SplitMix64 a(123), b(123), c(124);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 64; ++i) {
    uint64_t x = a.next();
    all_equal &= x == b.next();
    any_diff |= x != c.next();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("unit draws live in the half-open interval with mean one half") {
  SplitMix64 rng(5);
  double sum = 0;
  const int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    double u = rng.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // 4 sigma of the mean of kDraws uniforms
  double tol = 4.0 / std::sqrt(12.0 * kDraws);
  CHECK(std::fabs(sum / kDraws - 0.5) < tol);
}

TEST_CASE("bounded draws are unbiased across a non-power-of-two range") {
  SplitMix64 rng(17);
  const uint64_t kBuckets = 12;
  const int kDraws = 240000;
  std::vector<uint64_t> counts(kBuckets, 0);
  for (int i = 0; i < kDraws; ++i) {
    uint64_t v = rng.next_below(kBuckets);
    REQUIRE(v < kBuckets);
    ++counts[v];
  }
  double expect = static_cast<double>(kDraws) / kBuckets;
  double chi2 = 0;
  for (auto c : counts) {
    double d = c - expect;
    chi2 += d * d / expect;
  }
  CHECK(chi2 < testutil::chi2_quantile(kBuckets - 1, testutil::kZ1e4));
}

TEST_CASE("hash3 separates neighboring keys") {
  uint64_t h0 = hash3(1, 0, 0);
  CHECK(hash3(1, 0, 1) != h0);
  CHECK(hash3(1, 1, 0) != h0);
  CHECK(hash3(2, 0, 0) != h0);
  // unit mapping keeps hashes in [0,1)
  CHECK(unit_from_bits(~0ull) < 1.0);
  CHECK(unit_from_bits(0) == 0.0);
}

TEST_CASE("alias sampler matches the target distribution") {
  auto d = Distribution::dyadic(8);
  AliasSampler sampler(d);
  SplitMix64 rng(99);
  const int kDraws = 1000000;
  std::vector<uint64_t> counts(d.n(), 0);
  for (int i = 0; i < kDraws; ++i) ++counts[sampler.sample(rng)];
  double chi2 = 0;
  for (uint64_t i = 0; i < d.n(); ++i) {
    double expect = kDraws * d[i];
    double diff = counts[i] - expect;
    chi2 += diff * diff / expect;
  }
  CHECK(chi2 < testutil::chi2_quantile(static_cast<double>(d.n() - 1), testutil::kZ1e4));
}

TEST_CASE("alias sampler never emits zero-mass items") {
  auto d = Distribution::uniform_on(64, 16, 24);
  AliasSampler sampler(d);
  SplitMix64 rng(31);
  for (int i = 0; i < 20000; ++i) {
    uint64_t v = sampler.sample(rng);
    REQUIRE(v >= 16);
    REQUIRE(v < 24);
  }
}

TEST_CASE("alias sampler handles larger bases under a chi-square check") {
  auto d = Distribution::zipf(1024, 1.0);
  AliasSampler sampler(d);
  SplitMix64 rng(7);
  const int kDraws = 1000000;
  std::vector<uint64_t> counts(d.n(), 0);
  for (int i = 0; i < kDraws; ++i) ++counts[sampler.sample(rng)];
  // merge the thin tail so every cell has expectation >= 20
  double chi2 = 0;
  double pool_e = 0, pool_c = 0;
  double df = 0;
  for (uint64_t i = 0; i < d.n(); ++i) {
    double e = kDraws * d[i];
    if (e >= 20.0) {
      double diff = counts[i] - e;
      chi2 += diff * diff / e;
      df += 1;
    } else {
      pool_e += e;
      pool_c += counts[i];
    }
  }
  if (pool_e > 0) {
    double diff = pool_c - pool_e;
    chi2 += diff * diff / pool_e;
    df += 1;
  }
  CHECK(chi2 < testutil::chi2_quantile(df - 1, testutil::kZ1e4));
}

}  // TEST_SUITE
