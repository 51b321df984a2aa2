#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "hbtd/count_tensor.hpp"
#include "hbtd/gibbs.hpp"
#include "hbtd/hierarchy.hpp"
#include "hbtd/model.hpp"
#include "hbtd/rng.hpp"

namespace {

hbtd::ModelConfig bench_config(hbtd::SamplerVariant variant) {
  hbtd::ModelConfig cfg;
  cfg.p = 2;
  cfg.dims = {50, 40, 30};
  cfg.k_dims = {4, 3};
  cfg.beta = {1.0, 1.0};
  cfg.lambda = {100};
  cfg.sampler.variant = variant;
  return cfg;
}

void BM_sweep(benchmark::State& state, hbtd::SamplerVariant variant) {
  const auto cfg = bench_config(variant);
  const hbtd::Generated g = hbtd::generate(cfg, 1);
  hbtd::GibbsChain chain(cfg, g.counts);
  hbtd::Rng rng(2);
  chain.init(rng);
  for (auto _ : state) chain.sweep(rng);
  state.SetItemsProcessed(state.iterations() * g.counts.total());
}

void BM_conditional(benchmark::State& state) {
  const auto cfg = bench_config(hbtd::SamplerVariant::collapsed);
  const hbtd::Generated g = hbtd::generate(cfg, 1);
  hbtd::GibbsChain chain(cfg, g.counts);
  hbtd::Rng rng(2);
  chain.init(rng);
  for (auto _ : state) benchmark::DoNotOptimize(chain.conditional_z(0, 0));
}

void BM_crp_next_probs(benchmark::State& state) {
  std::vector<std::int64_t> counts(state.range(0));
  for (std::int64_t i = 0; i < state.range(0); ++i) counts[i] = i + 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(hbtd::crp_next_probs(counts, 1.0));
}

void BM_topic_index_roundtrip(benchmark::State& state) {
  const hbtd::TopicIndexMap kmap({7, 5, 3});
  for (auto _ : state)
    for (std::int64_t k = 0; k < kmap.total(); ++k)
      benchmark::DoNotOptimize(kmap.flat(kmap.tuple(k)));
}

}  // namespace

BENCHMARK_CAPTURE(BM_sweep, collapsed, hbtd::SamplerVariant::collapsed);
BENCHMARK_CAPTURE(BM_sweep, noncollapsed, hbtd::SamplerVariant::noncollapsed);
BENCHMARK(BM_conditional);
BENCHMARK(BM_crp_next_probs)->Arg(8)->Arg(64);
BENCHMARK(BM_topic_index_roundtrip);

BENCHMARK_MAIN();
