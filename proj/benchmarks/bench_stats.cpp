#include <benchmark/benchmark.h>

#include "ccrm/rng.hpp"
#include "ccrm/stats.hpp"

namespace {

using namespace ccrm;

std::vector<double> draws(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform_open();
  return v;
}

void BM_Spearman(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = draws(n, 1), y = draws(n, 2);
  const stats::PermutationOptions options{1000, 0, 1};
  for (auto _ : state) benchmark::DoNotOptimize(stats::spearman(x, y, options));
}
BENCHMARK(BM_Spearman)->Arg(100)->Arg(1000);

void BM_HistogramJsd(benchmark::State& state) {
  const auto a = draws(870, 3), b = draws(870, 4);
  const stats::HistogramSpec spec;
  for (auto _ : state) {
    const auto p = stats::histogram(a, spec);
    const auto q = stats::histogram(b, spec);
    benchmark::DoNotOptimize(stats::js_divergence(p, q));
  }
}
BENCHMARK(BM_HistogramJsd);

}  // namespace
