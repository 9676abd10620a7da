#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccrm/error.hpp"

namespace ccrm::stats {

class InsufficientData : public Error {
 public:
  using Error::Error;
};
class ConstantInput : public Error {
 public:
  using Error::Error;
};
class EmptyIntersection : public Error {
 public:
  using Error::Error;
};
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class NotNormalized : public Error {
 public:
  using Error::Error;
};

// Ranks 1..n in ascending order of value; tied values share the mean of the
// ranks they span.
std::vector<double> midranks(std::span<const double> values);

struct SpearmanResult {
  double rho = 0;
  double p_value = 1;
};

struct PermutationOptions {
  std::size_t permutations = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;  // does not change the result
};

/// Spearman rank correlation: Pearson correlation of midranks. The two-sided
/// p-value is a permutation test, (1 + #{|ρ_perm| ≥ |ρ|}) / (1 + permutations),
/// where permutation i is drawn from a stream seeded by (seed, i).
///
/// Throws InsufficientData when n < 3 or lengths differ, ConstantInput when
/// either side has a single distinct value.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y, const PermutationOptions& options = {});

/// Keys with scores, highest score first. Ties keep input order.
class RankedPairList {
 public:
  RankedPairList() = default;
  // Sorts descending (stable). Throws on duplicate keys or non-finite scores.
  RankedPairList(std::string source_label, std::vector<std::pair<std::string, double>> pairs);

  const std::string& source_label() const { return label_; }
  const std::vector<std::pair<std::string, double>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  // Rank 1 = highest score; ties share their mean rank.
  std::vector<double> ranks() const;

 private:
  std::string label_;
  std::vector<std::pair<std::string, double>> pairs_;
};

struct AlignedRanks {
  std::vector<std::string> keys;          // common keys, in first-list order
  std::vector<std::string> sources;       // list labels
  std::vector<std::vector<double>> ranks; // ranks[source][row], rank within the full source list
  std::vector<std::size_t> contributed;   // keys each source brought
};

// Joins the lists on their common keys. Throws EmptyIntersection.
AlignedRanks align_rankings(std::span<const RankedPairList> lists);

struct HistogramSpec {
  double lower = -1.0;
  double upper = 1.0;
  std::size_t bins = 40;
  double smoothing_epsilon = 1e-6;

  void validate() const;
};

// Bin probabilities: counts plus epsilon per bin, normalized to sum to 1.
// Out-of-range values are clamped into the edge bins with a warning.
std::vector<double> histogram(std::span<const double> values, const HistogramSpec& spec);

// Jensen-Shannon divergence with base-2 logarithms, so the result lies in [0, 1].
double js_divergence(std::span<const double> p, std::span<const double> q);

double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);

}  // namespace ccrm::stats
