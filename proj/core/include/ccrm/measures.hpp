#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ccrm/corpus.hpp"
#include "ccrm/matrix.hpp"

namespace ccrm::measures {

using corpus::AttentionMatrix;
using corpus::AttentionSource;
using corpus::ConceptIds;
using corpus::CorpusSnapshot;

class UndefinedBias : public Error {
 public:
  using Error::Error;
};

// |a ∩ b| / |a ∪ b|, with jaccard(∅, ∅) = 0: two empty descriptions carry no
// evidence of similarity.
double jaccard(const ConceptIds& a, const ConceptIds& b);

// Any set-overlap score in [0, 1] may stand in for jaccard.
using SetSimilarity = std::function<double(const ConceptIds&, const ConceptIds&)>;

enum class Perspective {
  Global,  // union of every language edition's description of each cuisine
  Native,  // the cuisine's own-language description only
};

std::string_view to_string(Perspective p);

// Cuisine x cuisine, symmetric, diagonal 1.0 where the cuisine has a description.
struct SimilarityMatrix {
  LabeledMatrix scores;
  Perspective perspective = Perspective::Global;
};

// Observer language x cuisine.
struct UnderstandingMatrix {
  LabeledMatrix scores;
};

// Language x cuisine; missing where the language has no article on the cuisine
// or its row is undefined (zero total attention).
struct BiasMatrix {
  LabeledMatrix values;
  AttentionSource source = AttentionSource::Views;
};

struct BiasSummary {
  std::string language;
  std::optional<double> self_focus;
  std::optional<double> regional;
};

struct Thresholds {
  int min_cuisines = 3;
  int min_neighbors = 3;
};

// Native reference description of a cuisine: union of every owner language's
// article. std::nullopt when no owner language has one.
std::optional<ConceptIds> native_description(const CorpusSnapshot& snapshot, std::string_view cuisine);

SimilarityMatrix cultural_similarity(const CorpusSnapshot& snapshot, Perspective perspective,
                                     const SetSimilarity& similarity = jaccard);

UnderstandingMatrix cultural_understanding(const CorpusSnapshot& snapshot, const SetSimilarity& similarity = jaccard);

/// Relative attention of language l to cuisine o, minus the mean relative
/// attention all other languages give o:
///
///   bias(l,o) = f(l,o)/Σ_ō f(l,ō) − mean_{l̄≠l} f(l̄,o)/Σ_ō f(l̄,ō)
///
/// Languages with zero total attention are left out of the mean. Throws
/// UndefinedBias when l has zero total attention or no other language has any.
double bias(const AttentionMatrix& attention, std::size_t l, std::size_t o);
double bias(const AttentionMatrix& attention, std::string_view language, std::string_view cuisine);

BiasMatrix bias_matrix(const AttentionMatrix& attention);

/// Mean bias toward own cuisines minus mean bias toward all others, over the
/// cuisines the language covers. Ranges over [-2, 2]. std::nullopt when the
/// language covers fewer than `min_cuisines` cuisines or either group is empty.
std::optional<double> self_focus(const BiasMatrix& bias, const corpus::OwnershipMap& ownership,
                                 std::string_view language, int min_cuisines = 3);

// Cuisine-level neighborhood derived from country codes and adjacency. Two
// different cuisines are neighbors when one of their countries is shared or
// adjacent.
class Geography {
 public:
  Geography(const std::vector<corpus::Cuisine>& cuisines, const corpus::AdjacencyMap& adjacency);
  explicit Geography(const CorpusSnapshot& snapshot) : Geography(snapshot.cuisines, snapshot.adjacency) {}

  bool cuisines_adjacent(std::string_view a, std::string_view b) const;
  // Cuisines adjacent to any of `own`, excluding `own` itself.
  bool neighbors_any(const std::set<std::string>& own, std::string_view cuisine) const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> countries_;
  corpus::AdjacencyMap adjacency_;
};

// Same difference as self_focus, between neighbor cuisines and non-neighbor
// cuisines, with the language's own cuisines excluded from both groups.
std::optional<double> regional_bias(const BiasMatrix& bias, const corpus::OwnershipMap& ownership,
                                    const Geography& geography, std::string_view language, int min_neighbors = 3);

std::vector<BiasSummary> summarize_biases(const BiasMatrix& bias, const CorpusSnapshot& snapshot,
                                          const Thresholds& thresholds = {});

// Mean similarity to neighbor cuisines divided by mean similarity to the rest.
std::optional<double> neighbor_similarity_ratio(const SimilarityMatrix& similarity, std::string_view cuisine,
                                                const Geography& geography, int min_neighbors = 3);

struct CoverageRow {
  std::string language;
  std::uint64_t size_articles = 0;
  std::size_t cuisine_article_count = 0;

  bool operator==(const CoverageRow&) const = default;
};

std::vector<CoverageRow> coverage_stats(const CorpusSnapshot& snapshot);

// For every cuisine, the similarity between each pair of language editions'
// descriptions of it, sorted descending.
std::map<std::string, std::vector<double>> description_agreement(const CorpusSnapshot& snapshot,
                                                                 const SetSimilarity& similarity = jaccard);

}  // namespace ccrm::measures
