#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccrm/corpus.hpp"
#include "ccrm/measures.hpp"
#include "ccrm/stats.hpp"

namespace ccrm::validate {

class InsufficientPairs : public Error {
 public:
  using Error::Error;
};

// A third-party ranking of country pairs, keyed "AA|BB". Undirected rankings
// are stored with both directions so they join against directed ones.
struct ExternalRanking {
  std::string label;
  bool directed = false;
  stats::RankedPairList pairs;
};

bool is_country_pair_key(std::string_view key);

// Builds a ranking from raw rows. An undirected ranking may list a pair in
// one or both orders, but both orders must then carry the same score.
ExternalRanking make_external_ranking(std::string label, bool directed,
                                      const std::vector<std::pair<std::string, double>>& rows);

// Reads `key<TAB>score` and the optional `<stem>.meta.json` sidecar
// ({"label": ..., "directed": ...}). Without a sidecar the label is the file
// stem and the ranking is undirected.
ExternalRanking load_external_ranking(const std::filesystem::path& path);
void save_external_ranking(const ExternalRanking& ranking, const std::filesystem::path& path);

// Plain `key<TAB>score` ranking with "a|b" keys of any kind (cuisine pairs,
// for instance). Nothing is mirrored. The label is the file stem.
stats::RankedPairList load_ranking(const std::filesystem::path& path);
void save_ranking(const stats::RankedPairList& ranking, const std::filesystem::path& path);

struct DirectedRanking {
  stats::RankedPairList ranking;
  std::size_t cells_used = 0;
  std::size_t cells_missing = 0;  // dropped before ranking
};

// Understanding scores as directed country pairs: observer country (any
// country of a cuisine the language owns) to cuisine country. Scores landing
// on the same pair are averaged; same-country pairs are dropped.
DirectedRanking understanding_ranking(const measures::UnderstandingMatrix& understanding,
                                      const corpus::CorpusSnapshot& snapshot, std::string label = "wiki");

// Upper-triangle cuisine pairs "a|b" (a < b) with their similarity.
stats::RankedPairList similarity_ranking(const measures::SimilarityMatrix& similarity, std::string label = "similarity");

struct Comparison {
  std::string a;
  std::string b;
  std::size_t keys_a = 0;
  std::size_t keys_b = 0;
  std::size_t common = 0;
  std::optional<stats::SpearmanResult> result;
  std::string error;  // set when result is empty
};

struct CorrelationReport {
  std::vector<Comparison> comparisons;

  const Comparison* find(std::string_view a, std::string_view b) const;  // either order
  bool any_result() const;
};

// Spearman for every pair among the measure and the externals, each over the
// two lists' common keys. Failed comparisons are reported, not thrown.
CorrelationReport correlate_with_external(const stats::RankedPairList& measure,
                                          const std::vector<ExternalRanking>& externals,
                                          const stats::PermutationOptions& options = {});

// Rankings of the three measures keyed on directed language pairs "l|m".
// Similarity of cuisines (a, b) maps to the owners of a and b, understanding
// and bias of (l, o) to l and the owners of o. Same-language pairs are dropped
// and several cells on one key are averaged.
struct MeasureRankings {
  stats::RankedPairList similarity;
  stats::RankedPairList understanding;
  stats::RankedPairList affinity;
};

MeasureRankings language_pair_rankings(const measures::SimilarityMatrix& similarity,
                                       const measures::UnderstandingMatrix& understanding,
                                       const measures::BiasMatrix& bias, const corpus::OwnershipMap& ownership);

CorrelationReport cross_measure_correlations(const measures::SimilarityMatrix& similarity,
                                             const measures::UnderstandingMatrix& understanding,
                                             const measures::BiasMatrix& bias, const corpus::OwnershipMap& ownership,
                                             const stats::PermutationOptions& options = {});

struct CrowdTask {
  std::string task_id;
  std::string high_a, high_b;
  std::string low_a, low_b;

  bool operator==(const CrowdTask&) const = default;
};

// Top-k pairs crossed with bottom-k pairs, k² tasks. High pairs in rank order,
// low pairs from the least similar up. Keys must be "a|b".
std::vector<CrowdTask> generate_crowd_tasks(const stats::RankedPairList& ranking, int k = 15);
std::string crowd_tasks_tsv(const std::vector<CrowdTask>& tasks);

struct Judgment {
  std::string task_id;
  bool chose_high = false;  // the worker picked the high-similarity pair
};

struct TallyResult {
  std::size_t tasks = 0;
  std::size_t majority_high = 0;
  std::size_t majority_low = 0;
  std::size_t ties = 0;
};

TallyResult tally_majority(const std::vector<Judgment>& judgments);

}  // namespace ccrm::validate
