// Microbenchmarks for the paths the estimators spend their time in: alias
// draws, exact divergence evaluation, distinct-count sketch insertion, and
// the streaming estimator feed loops.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "streamdist/alias_sampler.hpp"
#include "streamdist/distribution.hpp"
#include "streamdist/divergence.hpp"
#include "streamdist/f0_entropy.hpp"
#include "streamdist/f0_sketch.hpp"
#include "streamdist/large_small.hpp"
#include "streamdist/random_order.hpp"
#include "streamdist/rng.hpp"

namespace sd = streamdist;

namespace {

std::vector<uint64_t> zipf_tokens(uint64_t n, uint64_t m, uint64_t seed) {
  sd::AliasSampler sampler(sd::Distribution::zipf(n, 1.0));
  sd::SplitMix64 rng(seed);
  std::vector<uint64_t> tokens(m);
  for (uint64_t i = 0; i < m; ++i) tokens[i] = sampler.sample(rng);
  return tokens;
}

void BM_AliasSample(benchmark::State& state) {
  sd::AliasSampler sampler(sd::Distribution::zipf(state.range(0), 1.0));
  sd::SplitMix64 rng(42);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AliasSample)->Arg(1 << 10)->Arg(1 << 16);

void BM_DivergenceExact(benchmark::State& state) {
  sd::Distribution p = sd::Distribution::zipf(state.range(0), 1.0);
  sd::Distribution q = sd::Distribution::zipf(state.range(0), 1.2);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sd::divergence_exact(sd::DivergenceKind::kTriangle, p, q));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DivergenceExact)->Arg(1 << 10)->Arg(1 << 16);

// Insertion cost of the k-minimum-values sketch once it is saturated,
// which is the state it spends nearly all of a long stream in.
void BM_KmvInsert(benchmark::State& state) {
  double eps0 = 2.0 / std::sqrt(static_cast<double>(state.range(0)));  // k = range
  sd::F0Sketch sketch(eps0, 0.05, 7);
  for (uint64_t i = 0; i < 4 * static_cast<uint64_t>(state.range(0)); ++i)
    sketch.insert(i);
  uint64_t item = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sketch.insert(item++));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KmvInsert)->Arg(64)->Arg(1600);

void BM_F0EntropyFeed(benchmark::State& state) {
  uint64_t m = static_cast<uint64_t>(state.range(0));
  std::vector<uint64_t> tokens = zipf_tokens(10000, m, 11);
  for (auto _ : state) {
    sd::F0EntropyEstimator est(
        {.n = 10000, .max_len = m, .eps = 0.1, .eps0 = 0.05, .seed = 3});
    for (uint64_t tok : tokens) est.feed(tok);
    benchmark::DoNotOptimize(est.live_space_words());
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_F0EntropyFeed)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_LargeSmallFeed(benchmark::State& state) {
  uint64_t m = static_cast<uint64_t>(state.range(0));
  std::vector<uint64_t> tokens = zipf_tokens(10000, m, 12);
  for (auto _ : state) {
    sd::LargeSmallEstimator est(
        {.n = 10000, .max_len = m, .alpha = 0.5, .eps = 0.05, .seed = 3});
    for (uint64_t tok : tokens) est.feed(tok);
    benchmark::DoNotOptimize(est.live_space_words());
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_LargeSmallFeed)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RandomOrderFeed(benchmark::State& state) {
  uint64_t m = static_cast<uint64_t>(state.range(0));
  std::vector<uint64_t> tokens = zipf_tokens(10000, m, 13);
  for (auto _ : state) {
    sd::RandomOrderEstimator est(
        {.n = 10000, .eps = 0.2, .seed = 3, .input_random_order = true});
    for (uint64_t tok : tokens) est.feed(tok);
    benchmark::DoNotOptimize(est.tokens_fed());
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_RandomOrderFeed)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
