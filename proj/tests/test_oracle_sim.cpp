#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "streamdist/errors.hpp"
#include "streamdist/oracle_sim.hpp"
#include "streamdist/stream.hpp"

using namespace streamdist;

namespace {

StreamOracleParams make_params(uint64_t t, uint64_t seed, uint64_t extras = 0) {
  StreamOracleParams p;
  p.t = t;
  p.seed = seed;
  p.extra_probes = extras;
  return p;
}

}  // namespace

TEST_SUITE("oracle_sim") {

TEST_CASE("one-pass construction and call-order contracts") {
  CHECK_THROWS_AS(OnePassStreamOracle(0, false, make_params(3, 1)), ContractError);
  CHECK_THROWS_AS(OnePassStreamOracle(8, false, make_params(0, 1)), ContractError);
  // uniform extra probes only make sense against a single distribution
  CHECK_THROWS_AS(OnePassStreamOracle(8, true, make_params(3, 1, 2)), ContractError);

  OnePassStreamOracle oracle(8, false, make_params(3, 1));
  CHECK_THROWS_AS(oracle.sample(Target::kP), ContractError);  // before finish
  CHECK_THROWS_AS(oracle.probe(Target::kP, 0), ContractError);
  CHECK_THROWS_AS(oracle.feed({Target::kQ, 0}), ContractError);  // no q side
  oracle.feed({Target::kP, 2});
  oracle.finish();
  CHECK_THROWS_AS(oracle.feed({Target::kP, 2}), ContractError);  // after finish
  CHECK(oracle.sample(Target::kP) == 2);
  CHECK_THROWS_AS(oracle.sample(Target::kQ), ContractError);  // no q target
}

TEST_CASE("one-pass generative calls are jointly iid from the empirical law") {
  // stream multiset {0, 0, 1}: three with-replacement draws should hit each
  // pattern with probability (2/3)^#zeros (1/3)^#ones, independently
  const int kTrials = 20000;
  std::vector<uint64_t> cells(8, 0);
  SplitMix64 shuffle_rng(5150);
  for (int trial = 0; trial < kTrials; ++trial) {
    std::vector<uint64_t> items = {0, 0, 1};
    for (uint64_t i = 2; i > 0; --i)
      std::swap(items[i], items[shuffle_rng.next_below(i + 1)]);
    OnePassStreamOracle oracle(4, false, make_params(3, 9000 + trial));
    for (uint64_t x : items) oracle.feed({Target::kP, x});
    oracle.finish();
    uint64_t idx = 0;
    for (int j = 0; j < 3; ++j) idx = idx * 2 + oracle.sample(Target::kP);
    ++cells[idx];
  }
  double chi2 = 0.0;
  for (int idx = 0; idx < 8; ++idx) {
    int ones = ((idx >> 2) & 1) + ((idx >> 1) & 1) + (idx & 1);
    double expect = kTrials * std::pow(2.0 / 3.0, 3 - ones) * std::pow(1.0 / 3.0, ones);
    double d = cells[idx] - expect;
    chi2 += d * d / expect;
  }
  CHECK(chi2 < testutil::chi2_quantile(7, testutil::kZ1e4));
}

TEST_CASE("one-pass probes answer exact suffix-complete counts after pruning") {
  // windows fill at different times on the two sides; kept items keep exact
  // full-stream counts, dropped items refuse probes
  OnePassStreamOracle oracle(16, true, make_params(2, 44));
  for (StreamToken tok : std::vector<StreamToken>{{Target::kP, 5},
                                                  {Target::kQ, 2},
                                                  {Target::kP, 5},
                                                  {Target::kQ, 5},
                                                  {Target::kP, 7},
                                                  {Target::kQ, 2},
                                                  {Target::kP, 5},
                                                  {Target::kP, 7}})
    oracle.feed(tok);
  oracle.finish();
  CHECK(oracle.stream_len(Target::kP) == 5);
  CHECK(oracle.stream_len(Target::kQ) == 3);
  CHECK(oracle.probe(Target::kP, 5) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
  CHECK(oracle.probe(Target::kQ, 5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(oracle.probe(Target::kQ, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(oracle.probe(Target::kP, 2) == 0.0);
  CHECK_THROWS_AS(oracle.probe(Target::kP, 7), ContractError);  // pruned away
  CHECK_THROWS_AS(oracle.probe(Target::kP, 99), ContractError);  // outside base

  CHECK(oracle.sample(Target::kP) == 5);  // prefix is [5, 5]; either way 5
  CHECK(oracle.sample(Target::kP) == 5);
  CHECK_THROWS_AS(oracle.sample(Target::kP), ContractError);  // budget t = 2
}

TEST_CASE("one-pass extra probes cover unsampled items exactly") {
  OnePassStreamOracle oracle(10, false, make_params(4, 3, 5));
  for (int k = 0; k < 12; ++k) oracle.feed({Target::kP, 1});
  oracle.finish();
  CHECK(oracle.probe(Target::kP, 1) == 1.0);
  int zero_mass = 0;
  for (uint64_t i = 0; i < 10; ++i) {
    try {
      if (oracle.probe(Target::kP, i) == 0.0) ++zero_mass;
    } catch (const ContractError&) {
    }
  }
  CHECK(zero_mass == 5);  // exactly the extras answer zero
  CHECK(oracle.live_space_words() <= 4 + 3 * 6);
}

TEST_CASE("one-pass keeps short streams whole and serves past their length") {
  OnePassStreamOracle oracle(4, false, make_params(5, 21));
  oracle.feed({Target::kP, 0});
  oracle.feed({Target::kP, 1});
  oracle.finish();
  for (int j = 0; j < 5; ++j) CHECK(oracle.sample(Target::kP) <= 1);
  CHECK(oracle.probe(Target::kP, 0) == 0.5);
  CHECK(oracle.probe(Target::kP, 1) == 0.5);
}

TEST_CASE("two-pass reservoirs land uniformly over stream positions") {
  const uint64_t m = 50, t = 2000;
  TwoPassStreamOracle oracle(m, false, make_params(t, 1234));
  std::vector<StreamToken> toks;
  for (uint64_t i = 0; i < m; ++i) toks.push_back({Target::kP, i});  // item = position
  VectorStreamSource src(toks, m);
  oracle.consume(src);
  std::vector<uint64_t> hits(m, 0);
  for (uint64_t j = 0; j < t; ++j) ++hits[oracle.sample(Target::kP)];
  double chi2 = 0.0;
  double expect = static_cast<double>(t) / m;
  for (uint64_t i = 0; i < m; ++i) {
    double d = hits[i] - expect;
    chi2 += d * d / expect;
  }
  CHECK(chi2 < testutil::chi2_quantile(static_cast<double>(m - 1), testutil::kZ1e4));
  // all items are distinct, so every sampled item probes to exactly 1/m
  CHECK(oracle.probe(Target::kP, toks[0].item) == doctest::Approx(1.0 / m).epsilon(1e-15));
}

TEST_CASE("two-pass probes are exact and restricted to the fixed probe set") {
  // q side has a known skewed profile; p side is a point mass
  std::vector<StreamToken> toks;
  for (int k = 0; k < 6; ++k) toks.push_back({Target::kP, 3});
  for (int k = 0; k < 9; ++k) toks.push_back({Target::kQ, 1});
  for (int k = 0; k < 3; ++k) toks.push_back({Target::kQ, 7});
  VectorStreamSource src(toks, 8);
  TwoPassStreamOracle oracle(8, true, make_params(64, 5));
  oracle.consume(src);
  CHECK(oracle.stream_len(Target::kP) == 6);
  CHECK(oracle.stream_len(Target::kQ) == 12);
  CHECK(oracle.sample(Target::kP) == 3);
  CHECK(oracle.probe(Target::kP, 3) == 1.0);
  CHECK(oracle.probe(Target::kQ, 3) == 0.0);
  CHECK(oracle.probe(Target::kQ, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(oracle.probe(Target::kQ, 7) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(oracle.probe(Target::kP, 0), ContractError);  // never sampled
}

TEST_CASE("two-pass runs are deterministic in the seed") {
  StreamGenSpec spec{.p = Distribution::zipf(64, 1.0), .m_p = 2000, .seed = 8};
  auto run = [&](uint64_t oracle_seed) {
    IidStreamSource src(spec);
    TwoPassStreamOracle oracle(64, false, make_params(40, oracle_seed));
    oracle.consume(src);
    std::vector<uint64_t> out;
    for (int j = 0; j < 40; ++j) out.push_back(oracle.sample(Target::kP));
    return out;
  };
  auto a = run(77);
  CHECK(a == run(77));
  CHECK(a != run(78));

  // every sampled item answers a positive mass; distinct masses sum below 1
  IidStreamSource src(spec);
  TwoPassStreamOracle oracle(64, false, make_params(40, 77));
  oracle.consume(src);
  std::set<uint64_t> distinct;
  for (int j = 0; j < 40; ++j) distinct.insert(oracle.sample(Target::kP));
  double total = 0.0;
  for (uint64_t i : distinct) {
    double mass = oracle.probe(Target::kP, i);
    CHECK(mass > 0.0);
    total += mass;
  }
  CHECK(total <= 1.0 + 1e-12);
}

TEST_CASE("two-pass pass discipline is enforced") {
  TwoPassStreamOracle oracle(8, false, make_params(4, 2));
  oracle.pass1_feed({Target::kP, 1});
  oracle.pass1_feed({Target::kP, 2});
  CHECK_THROWS_AS(oracle.pass2_feed({Target::kP, 1}), ContractError);
  oracle.pass1_end();
  CHECK_THROWS_AS(oracle.pass1_feed({Target::kP, 1}), ContractError);
  CHECK_THROWS_AS(oracle.sample(Target::kP), ContractError);  // pass 2 missing
  oracle.pass2_feed({Target::kP, 1});
  CHECK_THROWS_AS(oracle.pass2_end(), ContractError);  // shorter second pass
}

TEST_CASE("two-pass rejects non-replayable sources and oversized extras") {
  class OneShotSource : public StreamSource {
   public:
    uint64_t base_size() const override { return 4; }
    bool next(StreamToken&) override { return false; }
    bool replayable() const override { return false; }
    void rewind() override { throw ContractError("not replayable"); }
  };
  OneShotSource once;
  TwoPassStreamOracle oracle(4, false, make_params(4, 2));
  CHECK_THROWS_AS(oracle.consume(once), ContractError);

  // extras must fit inside the unsampled part of the base
  std::vector<StreamToken> toks;
  for (uint64_t i = 0; i < 4; ++i) toks.push_back({Target::kP, i});
  VectorStreamSource src(toks, 4);
  TwoPassStreamOracle crowded(4, false, make_params(8, 3, 4));
  CHECK_THROWS_AS(crowded.consume(src), ContractError);
}

}  // TEST_SUITE
