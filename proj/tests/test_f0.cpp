#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "helpers.hpp"
#include "streamdist/alias_sampler.hpp"
#include "streamdist/errors.hpp"
#include "streamdist/f0_entropy.hpp"
#include "streamdist/f0_sketch.hpp"

using namespace streamdist;

TEST_SUITE("f0") {

TEST_CASE("summary sizes follow the printed formulas") {
  CHECK(F0Sketch::k_for(0.05) == 1600);
  CHECK(F0Sketch::k_for(0.1) == 400);
  CHECK(F0Sketch::k_for(0.99) == 5);  // even the loosest eps0 stores a few values
  CHECK_THROWS_AS(F0Sketch::k_for(2.0), ContractError);
  CHECK(F0Sketch::reps_for(0.05) == 5);
  CHECK(F0Sketch::reps_for(0.5) == 1);
  CHECK_THROWS_AS(F0Sketch(0.0, 0.05, 1), ContractError);
  CHECK_THROWS_AS(F0Sketch(0.1, 1.0, 1), ContractError);
}

TEST_CASE("distinct counts are exact below the summary capacity") {
  F0Sketch sk(0.2, 0.2, 77);  // k = 100
  CHECK(sk.estimate() == 0.0);
  for (uint64_t i = 0; i < 50; ++i) sk.insert(i * 37);
  for (uint64_t i = 0; i < 50; ++i) sk.insert(i * 37);  // repeats change nothing
  CHECK(sk.estimate() == 50.0);

  F0Sketch one(0.2, 0.2, 5);
  for (int r = 0; r < 1000; ++r) one.insert(42);
  CHECK(one.estimate() == 1.0);
  CHECK(one.space_words() == one.repetitions());
}

TEST_CASE("estimates stay within the accuracy target at scale") {
  const double eps0 = 0.05;
  const uint64_t f0 = 10000;
  int within = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    F0Sketch sk(eps0, 0.05, seed);
    for (uint64_t i = 0; i < f0; ++i) sk.insert(i);
    double err = std::fabs(sk.estimate() - static_cast<double>(f0)) / f0;
    CHECK(err <= 2 * eps0);
    if (err <= eps0) ++within;
  }
  CHECK(within >= 8);
}

TEST_CASE("summary space saturates and stops depending on the stream") {
  F0Sketch a(0.2, 0.2, 3);
  F0Sketch b(0.2, 0.2, 3);
  uint64_t cap = a.k() * a.repetitions();
  for (uint64_t i = 0; i < 2000; ++i) a.insert(i);
  for (uint64_t i = 0; i < 200000; ++i) b.insert(i);
  CHECK(a.space_words() == cap);
  CHECK(b.space_words() == cap);
}

TEST_CASE("insert reports how many words the summary grew by") {
  F0Sketch sk(0.5, 0.5, 9);  // k = 16, one repetition
  CHECK(sk.insert(1) == 1);
  CHECK(sk.insert(1) == 0);
  F0Sketch wide(0.5, 0.05, 9);  // five repetitions, one stored word each
  CHECK(wide.insert(4) == wide.repetitions());
}

TEST_CASE("expected-sum window endpoints") {
  auto [lo, hi] = F0EntropyEstimator::raw_sum_window(16.0, 0.1);
  double t = 1.1 * 1.1;
  CHECK(lo == doctest::Approx((1.0 - std::exp(-1.0)) * 15.0 / t).epsilon(1e-14));
  CHECK(hi == doctest::Approx(18.0).epsilon(1e-14));  // (1+eps)^2 H / t + 2 = H + 2
}

TEST_CASE("parameter validation") {
  F0EntropyParams bad;
  bad.n = 1;
  bad.max_len = 10;
  CHECK_THROWS_AS(F0EntropyEstimator{bad}, ContractError);
  bad.n = 16;
  bad.max_len = 0;
  CHECK_THROWS_AS(F0EntropyEstimator{bad}, ContractError);
  bad.max_len = 10;
  bad.eps = 0.0;
  CHECK_THROWS_AS(F0EntropyEstimator{bad}, ContractError);
}

TEST_CASE("ladder lifecycle: outgrown rungs are freed and the window advances") {
  F0EntropyParams params;
  params.n = 64;
  params.max_len = 1000;
  params.eps = 0.1;
  params.eps0 = 0.2;
  params.seed = 4;
  F0EntropyEstimator est(params);
  CHECK_THROWS_AS(est.report(), ContractError);  // empty stream

  SplitMix64 rng(11);
  for (int k = 0; k < 500; ++k) est.feed(rng.next_below(64));
  auto rep = est.report();
  CHECK(rep.m == 500);
  CHECK(rep.rung_guess <= 500.0);
  CHECK(500.0 < rep.rung_guess * 1.1);
  CHECK(rep.levels == est.levels());
  CHECK(rep.level_estimates.size() == rep.levels);
  // early rungs died along the way, freeing their sketches
  CHECK(est.live_space_words() < est.peak_space_words());
  CHECK(rep.live_space_words == est.live_space_words());

  for (int k = 0; k < 500; ++k) est.feed(rng.next_below(64));
  CHECK_THROWS_AS(est.feed(0), ContractError);  // beyond max_len
}

TEST_CASE("raw sums land inside a widened expectation window") {
  // uniform base: H = 10 bits; the window is a statement about E[raw], so
  // single realizations are checked against generously widened endpoints
  const uint64_t n = 1024, m = 30000;
  auto u = Distribution::uniform(n);
  auto [lo, hi] = F0EntropyEstimator::raw_sum_window(10.0, 0.1);
  int inside = 0;
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    F0EntropyParams params;
    params.n = n;
    params.max_len = m + 1;
    params.eps = 0.1;
    params.eps0 = 0.1;
    params.seed = seed;
    F0EntropyEstimator est(params);
    AliasSampler draw(u);
    SplitMix64 rng(1000 + seed);
    for (uint64_t k = 0; k < m; ++k) est.feed(draw.sample(rng));
    double raw = est.report().raw;
    CHECK(raw > 0.25 * lo);
    CHECK(raw < 2.0 * hi);
    if (raw >= 0.8 * lo && raw <= 1.2 * hi) ++inside;
  }
  CHECK(inside >= 2);
}

TEST_CASE("bias adjustment inverts the sandwich midpoint transform") {
  F0EntropyParams params;
  params.n = 256;
  params.max_len = 2000;
  params.eps = 0.1;
  params.eps0 = 0.2;
  params.seed = 8;
  F0EntropyEstimator est(params);
  SplitMix64 rng(2);
  for (int k = 0; k < 1500; ++k) est.feed(rng.next_below(256));
  auto rep = est.report();
  double t = 1.1 * 1.1;
  CHECK(rep.t == doctest::Approx(t).epsilon(1e-14));
  CHECK(rep.bias_adjusted ==
        doctest::Approx((rep.raw - 2.0) * t / (1.0 - std::exp(-1.0))).epsilon(1e-12));
}

}  // TEST_SUITE
