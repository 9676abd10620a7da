#include <benchmark/benchmark.h>

#include <fmt/format.h>

#include "ccrm/measures.hpp"
#include "ccrm/rng.hpp"

namespace {

using namespace ccrm;

// Languages own one cuisine each; every article links to a random subset of a concept pool.
corpus::CorpusSnapshot synthetic(int n, int pool) {
  corpus::CorpusSnapshot s;
  Rng rng(static_cast<std::uint64_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto code = fmt::format("{}{}", static_cast<char>('a' + i / 26), static_cast<char>('a' + i % 26));
    const auto country = fmt::format("{}{}", static_cast<char>('A' + i / 26), static_cast<char>('A' + i % 26));
    const auto cuisine = fmt::format("c{}", i);
    s.languages.push_back({code, code, static_cast<std::uint64_t>(1000 + i)});
    s.cuisines.push_back({cuisine, cuisine, {country}});
    s.ownership.language_to_own_cuisines[code] = {cuisine};
    if (i > 0) s.adjacency.add(country, s.cuisines[i - 1].country_codes[0]);
  }
  for (const auto& l : s.languages)
    for (const auto& c : s.cuisines) {
      corpus::ConceptSet set{l.code, c.id, {}};
      for (int k = 0; k < pool; ++k)
        if (rng.uniform_open() < 0.1) set.concepts.insert(fmt::format("Q{}", k));
      s.concept_sets.push_back(std::move(set));
      s.views.push_back({l.code, c.id, corpus::YearMonth{2013, 5}, 1 + rng.uniform_index(10000)});
    }
  s.canonicalize();
  return s;
}

void BM_GlobalSimilarity(benchmark::State& state) {
  const auto s = synthetic(static_cast<int>(state.range(0)), 400);
  for (auto _ : state) benchmark::DoNotOptimize(measures::cultural_similarity(s, measures::Perspective::Global));
}
BENCHMARK(BM_GlobalSimilarity)->Arg(10)->Arg(30);

void BM_Understanding(benchmark::State& state) {
  const auto s = synthetic(static_cast<int>(state.range(0)), 400);
  for (auto _ : state) benchmark::DoNotOptimize(measures::cultural_understanding(s));
}
BENCHMARK(BM_Understanding)->Arg(10)->Arg(30);

void BM_BiasMatrix(benchmark::State& state) {
  const auto s = synthetic(static_cast<int>(state.range(0)), 50);
  const auto attention = corpus::attention_matrix(s, corpus::AttentionSource::Views);
  for (auto _ : state) benchmark::DoNotOptimize(measures::bias_matrix(attention));
}
BENCHMARK(BM_BiasMatrix)->Arg(10)->Arg(30);

void BM_Summaries(benchmark::State& state) {
  const auto s = synthetic(30, 50);
  const auto bias = measures::bias_matrix(corpus::attention_matrix(s, corpus::AttentionSource::Views));
  for (auto _ : state) benchmark::DoNotOptimize(measures::summarize_biases(bias, s));
}
BENCHMARK(BM_Summaries);

}  // namespace
