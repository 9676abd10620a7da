#include <benchmark/benchmark.h>

#include "ccrm/sim.hpp"

namespace {

using namespace ccrm;

void BM_GenerateAttention(benchmark::State& state) {
  sim::SimConfig cfg;
  cfg.n_communities = static_cast<int>(state.range(0));
  cfg.affinity_sigma = 30;
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(sim::generate_attention(cfg, sim::Model::PopularityPlusAffinity, rng));
}
BENCHMARK(BM_GenerateAttention)->Arg(10)->Arg(30);

void BM_SigmaSweep(benchmark::State& state) {
  sim::SimConfig cfg;
  cfg.replications = 5;
  auto truth = cfg;
  truth.affinity_sigma = 30;
  const auto empirical = sim::pooled_bias_sample(truth, sim::Model::PopularityPlusAffinity, 5);
  const auto grid = sim::default_sigma_grid();
  for (auto _ : state)
    benchmark::DoNotOptimize(sim::sweep(cfg, sim::Model::PopularityPlusAffinity, sim::SweepParameter::Sigma, grid,
                                        empirical, stats::HistogramSpec{}));
}
BENCHMARK(BM_SigmaSweep)->Unit(benchmark::kMillisecond);

}  // namespace
