#include "ccrm/measures.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace ccrm::measures {

double jaccard(const ConceptIds& a, const ConceptIds& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const auto united = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(united);
}

std::string_view to_string(Perspective p) { return p == Perspective::Global ? "global" : "native"; }

std::optional<ConceptIds> native_description(const CorpusSnapshot& snapshot, std::string_view cuisine) {
  std::optional<ConceptIds> out;
  for (const auto& owner : snapshot.ownership.owners_of(cuisine)) {
    if (const auto* cs = snapshot.find_article(owner, cuisine)) {
      if (!out) out.emplace();
      out->insert(cs->concepts.begin(), cs->concepts.end());
    }
  }
  return out;
}

SimilarityMatrix cultural_similarity(const CorpusSnapshot& snapshot, Perspective perspective,
                                     const SetSimilarity& similarity) {
  const auto ids = snapshot.cuisine_ids();
  std::vector<std::optional<ConceptIds>> descriptions(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (perspective == Perspective::Native) {
      descriptions[i] = native_description(snapshot, ids[i]);
      continue;
    }
    for (const auto& cs : snapshot.concept_sets) {
      if (cs.cuisine != ids[i]) continue;
      if (!descriptions[i]) descriptions[i].emplace();
      descriptions[i]->insert(cs.concepts.begin(), cs.concepts.end());
    }
  }

  SimilarityMatrix out{LabeledMatrix(ids, ids), perspective};
  for (std::size_t a = 0; a < ids.size(); ++a) {
    if (!descriptions[a]) continue;
    out.scores.at(a, a) = 1.0;
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      if (!descriptions[b]) continue;
      const double s = similarity(*descriptions[a], *descriptions[b]);
      out.scores.at(a, b) = s;
      out.scores.at(b, a) = s;
    }
  }
  return out;
}

UnderstandingMatrix cultural_understanding(const CorpusSnapshot& snapshot, const SetSimilarity& similarity) {
  const auto langs = snapshot.language_codes();
  const auto ids = snapshot.cuisine_ids();
  UnderstandingMatrix out{LabeledMatrix(langs, ids)};
  for (std::size_t o = 0; o < ids.size(); ++o) {
    const auto native = native_description(snapshot, ids[o]);
    if (!native) continue;
    for (std::size_t l = 0; l < langs.size(); ++l) {
      if (const auto* cs = snapshot.find_article(langs[l], ids[o])) {
        out.scores.at(l, o) = similarity(cs->concepts, *native);
      }
    }
  }
  return out;
}

double bias(const AttentionMatrix& attention, std::size_t l, std::size_t o) {
  const double own_total = attention.row_total(l);
  if (!(own_total > 0)) {
    throw UndefinedBias(fmt::format("language '{}' has zero total attention", attention.languages[l]));
  }
  double others = 0;
  std::size_t eligible = 0;
  for (std::size_t other = 0; other < attention.language_count(); ++other) {
    if (other == l) continue;
    const double total = attention.row_total(other);
    if (!(total > 0)) continue;
    others += attention.at(other, o) / total;
    ++eligible;
  }
  if (eligible == 0) {
    throw UndefinedBias(fmt::format("no language other than '{}' has any attention", attention.languages[l]));
  }
  return attention.at(l, o) / own_total - others / static_cast<double>(eligible);
}

double bias(const AttentionMatrix& attention, std::string_view language, std::string_view cuisine) {
  const auto l = attention.language_index(language);
  const auto o = attention.cuisine_index(cuisine);
  if (!l) throw UndefinedBias(fmt::format("unknown language '{}'", language));
  if (!o) throw UndefinedBias(fmt::format("unknown cuisine '{}'", cuisine));
  return bias(attention, *l, *o);
}

BiasMatrix bias_matrix(const AttentionMatrix& attention) {
  const auto n_l = attention.language_count();
  const auto n_o = attention.cuisine_count();
  BiasMatrix out{LabeledMatrix(attention.languages, attention.cuisines), attention.source};

  std::vector<double> totals(n_l);
  std::size_t eligible = 0;
  for (std::size_t l = 0; l < n_l; ++l) {
    totals[l] = attention.row_total(l);
    if (totals[l] > 0) ++eligible;
  }
  if (eligible < 2) return out;

  // Column sums of relative attention over eligible languages; each cell then
  // subtracts its own share to get the mean over the others.
  std::vector<double> column(n_o, 0.0);
  for (std::size_t l = 0; l < n_l; ++l) {
    if (!(totals[l] > 0)) continue;
    for (std::size_t o = 0; o < n_o; ++o) column[o] += attention.at(l, o) / totals[l];
  }
  const double others = static_cast<double>(eligible - 1);
  for (std::size_t l = 0; l < n_l; ++l) {
    if (!(totals[l] > 0)) continue;
    for (std::size_t o = 0; o < n_o; ++o) {
      if (attention.is_missing(l, o)) continue;
      const double share = attention.at(l, o) / totals[l];
      out.values.at(l, o) = share - (column[o] - share) / others;
    }
  }
  return out;
}

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::optional<double> self_focus(const BiasMatrix& bias, const corpus::OwnershipMap& ownership,
                                 std::string_view language, int min_cuisines) {
  const auto l = bias.values.row_index(language);
  if (!l) return std::nullopt;
  const auto& own = ownership.own(language);
  std::vector<double> own_values, other_values;
  for (std::size_t o = 0; o < bias.values.cols(); ++o) {
    const auto& v = bias.values.at(*l, o);
    if (!v) continue;
    (own.count(bias.values.col_labels()[o]) ? own_values : other_values).push_back(*v);
  }
  const auto covered = own_values.size() + other_values.size();
  if (covered < static_cast<std::size_t>(std::max(min_cuisines, 0))) return std::nullopt;
  if (own_values.empty() || other_values.empty()) return std::nullopt;
  return mean(own_values) - mean(other_values);
}

Geography::Geography(const std::vector<corpus::Cuisine>& cuisines, const corpus::AdjacencyMap& adjacency)
    : adjacency_(adjacency) {
  for (const auto& c : cuisines) countries_[c.id] = c.country_codes;
}

bool Geography::cuisines_adjacent(std::string_view a, std::string_view b) const {
  if (a == b) return false;
  const auto ia = countries_.find(a);
  const auto ib = countries_.find(b);
  if (ia == countries_.end() || ib == countries_.end()) return false;
  for (const auto& ca : ia->second)
    for (const auto& cb : ib->second)
      if (ca == cb || adjacency_.adjacent(ca, cb)) return true;
  return false;
}

bool Geography::neighbors_any(const std::set<std::string>& own, std::string_view cuisine) const {
  if (own.count(std::string(cuisine))) return false;
  return std::any_of(own.begin(), own.end(), [&](const auto& c) { return cuisines_adjacent(c, cuisine); });
}

std::optional<double> regional_bias(const BiasMatrix& bias, const corpus::OwnershipMap& ownership,
                                    const Geography& geography, std::string_view language, int min_neighbors) {
  const auto l = bias.values.row_index(language);
  if (!l) return std::nullopt;
  const auto& own = ownership.own(language);
  if (own.empty()) return std::nullopt;
  std::vector<double> near, far;
  for (std::size_t o = 0; o < bias.values.cols(); ++o) {
    const auto& id = bias.values.col_labels()[o];
    const auto& v = bias.values.at(*l, o);
    if (!v || own.count(id)) continue;
    (geography.neighbors_any(own, id) ? near : far).push_back(*v);
  }
  if (near.size() < static_cast<std::size_t>(std::max(min_neighbors, 0)) || near.empty() || far.empty()) {
    return std::nullopt;
  }
  return mean(near) - mean(far);
}

std::vector<BiasSummary> summarize_biases(const BiasMatrix& bias, const CorpusSnapshot& snapshot,
                                          const Thresholds& thresholds) {
  const Geography geography(snapshot);
  std::vector<BiasSummary> out;
  for (const auto& code : bias.values.row_labels()) {
    out.push_back({code, self_focus(bias, snapshot.ownership, code, thresholds.min_cuisines),
                   regional_bias(bias, snapshot.ownership, geography, code, thresholds.min_neighbors)});
  }
  return out;
}

std::optional<double> neighbor_similarity_ratio(const SimilarityMatrix& similarity, std::string_view cuisine,
                                                const Geography& geography, int min_neighbors) {
  const auto& m = similarity.scores;
  const auto r = m.row_index(cuisine);
  if (!r) return std::nullopt;
  std::vector<double> near, far;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const auto& other = m.col_labels()[c];
    const auto& v = m.at(*r, c);
    if (!v || other == cuisine) continue;
    (geography.cuisines_adjacent(cuisine, other) ? near : far).push_back(*v);
  }
  if (near.size() < static_cast<std::size_t>(std::max(min_neighbors, 0)) || near.empty() || far.empty()) {
    return std::nullopt;
  }
  const double denominator = mean(far);
  if (denominator == 0.0) {
    spdlog::warn("neighbor similarity ratio for '{}' is undefined: non-neighbor mean is 0", cuisine);
    return std::nullopt;
  }
  return mean(near) / denominator;
}

std::vector<CoverageRow> coverage_stats(const CorpusSnapshot& snapshot) {
  std::vector<CoverageRow> out;
  for (const auto& l : snapshot.languages) {
    std::size_t count = 0;
    for (const auto& c : snapshot.cuisines) count += snapshot.has_article(l.code, c.id) ? 1 : 0;
    out.push_back({l.code, l.size_articles, count});
  }
  return out;
}

std::map<std::string, std::vector<double>> description_agreement(const CorpusSnapshot& snapshot,
                                                                 const SetSimilarity& similarity) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& c : snapshot.cuisines) {
    std::vector<const corpus::ConceptSet*> articles;
    for (const auto& l : snapshot.languages)
      if (const auto* cs = snapshot.find_article(l.code, c.id)) articles.push_back(cs);
    auto& values = out[c.id];
    for (std::size_t i = 0; i < articles.size(); ++i)
      for (std::size_t j = i + 1; j < articles.size(); ++j)
        values.push_back(similarity(articles[i]->concepts, articles[j]->concepts));
    std::sort(values.begin(), values.end(), std::greater<>());
  }
  return out;
}

}  // namespace ccrm::measures
