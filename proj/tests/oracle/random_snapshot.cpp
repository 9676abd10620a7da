#include "oracle/random_snapshot.hpp"

#include <string>

#include "ccrm/rng.hpp"

namespace ccrm::oracle {

namespace {

int between(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.uniform_index(hi - lo + 1)); }

}  // namespace

corpus::CorpusSnapshot random_snapshot(std::uint64_t seed, const RandomSnapshotOptions& options) {
  Rng rng(seed);
  static const std::vector<std::string> kLanguages = {"aa", "bb", "cc", "dd", "ee", "ff", "gg", "hh"};
  static const std::vector<std::string> kCountries = {"AA", "BB", "CC", "DD", "EE", "FF"};

  corpus::CorpusSnapshot s;
  const int n_l = between(rng, 2, options.max_languages);
  const int n_o = between(rng, 2, options.max_cuisines);
  for (int i = 0; i < n_l; ++i) {
    s.languages.push_back({kLanguages[i], "Language " + kLanguages[i], rng.uniform_index(100000)});
  }
  for (int i = 0; i < n_o; ++i) {
    corpus::Cuisine c{"k" + std::to_string(i), "Cuisine " + std::to_string(i), {}};
    c.country_codes.push_back(kCountries[rng.uniform_index(kCountries.size())]);
    if (rng.uniform_open() < 0.3) {
      const auto& extra = kCountries[rng.uniform_index(kCountries.size())];
      if (extra != c.country_codes.front()) c.country_codes.push_back(extra);
    }
    s.cuisines.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < kCountries.size(); ++i)
    for (std::size_t j = i + 1; j < kCountries.size(); ++j)
      if (rng.uniform_open() < 0.35) s.adjacency.add(kCountries[i], kCountries[j]);

  for (const auto& l : s.languages) {
    auto& own = s.ownership.language_to_own_cuisines[l.code];
    own.insert(s.cuisines[rng.uniform_index(s.cuisines.size())].id);
    if (rng.uniform_open() < 0.3) own.insert(s.cuisines[rng.uniform_index(s.cuisines.size())].id);
  }

  const corpus::YearMonth months[] = {{2013, 5}, {2013, 6}, {2013, 7}};
  for (const auto& l : s.languages)
    for (const auto& c : s.cuisines) {
      if (rng.uniform_open() >= options.article_probability) continue;
      corpus::ConceptSet cs{l.code, c.id, {}};
      for (int q = 1; q <= options.concept_pool; ++q)
        if (rng.uniform_open() < options.concept_probability) cs.concepts.insert("Q" + std::to_string(q));
      s.concept_sets.push_back(std::move(cs));
      for (const auto& m : months)
        if (rng.uniform_open() < 0.8) s.views.push_back({l.code, c.id, m, rng.uniform_index(41)});
    }
  s.canonicalize();
  s.validate();
  return s;
}

std::vector<std::vector<double>> random_positive_rows(std::uint64_t seed, int max_languages, int max_cuisines) {
  Rng rng(seed);
  const int n_l = between(rng, 2, max_languages);
  const int n_o = between(rng, 2, max_cuisines);
  std::vector<std::vector<double>> rows(n_l, std::vector<double>(n_o));
  for (auto& row : rows)
    for (auto& v : row) v = rng.exponential(1.0) * (rng.uniform_open() < 0.5 ? 1.0 : 1000.0);
  return rows;
}

}  // namespace ccrm::oracle
