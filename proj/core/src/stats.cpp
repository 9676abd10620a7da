#include "ccrm/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "ccrm/rng.hpp"

namespace ccrm::stats {

std::vector<double> midranks(std::span<const double> values) {
  const auto n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

struct Centered {
  std::vector<double> values;
  double sum_squares = 0;
};

Centered center(std::vector<double> v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  Centered c;
  for (auto& x : v) {
    x -= m;
    c.sum_squares += x * x;
  }
  c.values = std::move(v);
  return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SpearmanResult spearman(std::span<const double> x, std::span<const double> y, const PermutationOptions& options) {
  if (x.size() != y.size()) {
    throw InsufficientData(fmt::format("spearman: lengths differ ({} vs {})", x.size(), y.size()));
  }
  if (x.size() < 3) throw InsufficientData(fmt::format("spearman: need at least 3 pairs, got {}", x.size()));
  if (options.permutations == 0) throw InsufficientData("spearman: permutation count must be positive");

  const auto rx = center(midranks(x));
  const auto ry = center(midranks(y));
  if (rx.sum_squares == 0 || ry.sum_squares == 0) throw ConstantInput("spearman: input has no variation");

  const double scale = std::sqrt(rx.sum_squares * ry.sum_squares);
  const double rho = std::clamp(dot(rx.values, ry.values) / scale, -1.0, 1.0);
  const double threshold = std::abs(rho) - 1e-12;

  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::size_t> hits(workers, 0);
  auto run = [&](unsigned w) {
    std::vector<double> shuffled(ry.values.size());
    for (std::size_t i = w; i < options.permutations; i += workers) {
      shuffled = ry.values;
      Rng rng(derive_seed(options.seed, i));
      rng.shuffle(shuffled.begin(), shuffled.end());
      if (std::abs(dot(rx.values, shuffled) / scale) >= threshold) ++hits[w];
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  const auto total = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
  const double p = static_cast<double>(total + 1) / static_cast<double>(options.permutations + 1);
  return {rho, p};
}

RankedPairList::RankedPairList(std::string source_label, std::vector<std::pair<std::string, double>> pairs)
    : label_(std::move(source_label)), pairs_(std::move(pairs)) {
  std::unordered_map<std::string, int> seen;
  for (const auto& [key, score] : pairs_) {
    if (!std::isfinite(score)) throw Error(fmt::format("{}: score for '{}' is not finite", label_, key));
    if (seen[key]++) throw Error(fmt::format("{}: duplicate key '{}'", label_, key));
  }
  std::stable_sort(pairs_.begin(), pairs_.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
}

std::vector<double> RankedPairList::ranks() const {
  std::vector<double> negated;
  negated.reserve(pairs_.size());
  for (const auto& p : pairs_) negated.push_back(-p.second);
  return midranks(negated);
}

AlignedRanks align_rankings(std::span<const RankedPairList> lists) {
  if (lists.size() < 2) throw InsufficientData("align_rankings: need at least two lists");
  AlignedRanks out;
  std::vector<std::map<std::string, double, std::less<>>> rank_of(lists.size());
  for (std::size_t s = 0; s < lists.size(); ++s) {
    out.sources.push_back(lists[s].source_label());
    out.contributed.push_back(lists[s].size());
    const auto r = lists[s].ranks();
    for (std::size_t i = 0; i < r.size(); ++i) rank_of[s][lists[s].pairs()[i].first] = r[i];
  }
  out.ranks.resize(lists.size());
  for (const auto& [key, _] : lists[0].pairs()) {
    bool everywhere = true;
    for (std::size_t s = 1; s < lists.size() && everywhere; ++s) everywhere = rank_of[s].count(key) > 0;
    if (!everywhere) continue;
    out.keys.push_back(key);
    for (std::size_t s = 0; s < lists.size(); ++s) out.ranks[s].push_back(rank_of[s].find(key)->second);
  }
  if (out.keys.empty()) {
    std::vector<std::string> labels = out.sources;
    throw EmptyIntersection(fmt::format("no key is present in all of: {}", fmt::join(labels, ", ")));
  }
  return out;
}

void HistogramSpec::validate() const {
  if (!(lower < upper)) throw Error(fmt::format("histogram: lower ({}) must be below upper ({})", lower, upper));
  if (bins < 2) throw Error("histogram: need at least 2 bins");
  if (!(smoothing_epsilon >= 0)) throw Error("histogram: smoothing epsilon must be nonnegative");
}

std::vector<double> histogram(std::span<const double> values, const HistogramSpec& spec) {
  spec.validate();
  if (values.empty()) throw InsufficientData("histogram: no values");
  std::vector<double> counts(spec.bins, 0.0);
  std::size_t clamped = 0;
  const double width = (spec.upper - spec.lower) / static_cast<double>(spec.bins);
  for (double v : values) {
    if (std::isnan(v)) throw Error("histogram: NaN value");
    if (v < spec.lower || v > spec.upper) ++clamped;
    const double x = std::clamp(v, spec.lower, spec.upper);
    auto bin = static_cast<std::size_t>((x - spec.lower) / width);
    counts[std::min(bin, spec.bins - 1)] += 1.0;
  }
  if (clamped) spdlog::warn("histogram: clamped {} value(s) outside [{}, {}]", clamped, spec.lower, spec.upper);
  double total = 0;
  for (auto& c : counts) total += (c += spec.smoothing_epsilon);
  for (auto& c : counts) c /= total;
  return counts;
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionMismatch(fmt::format("js_divergence: sizes {} and {}", p.size(), q.size()));
  auto check = [](std::span<const double> v, const char* name) {
    double s = 0;
    for (double x : v) {
      if (!(x >= 0)) throw NotNormalized(fmt::format("js_divergence: {} has a negative or NaN entry", name));
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-9) throw NotNormalized(fmt::format("js_divergence: {} sums to {}", name, s));
  };
  check(p, "p");
  check(q, "q");
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    const double a = p[i] > 0 ? p[i] * std::log2(p[i] / m) : 0.0;
    const double b = q[i] > 0 ? q[i] * std::log2(q[i] / m) : 0.0;
    d += 0.5 * (a + b);  // a + b == b + a keeps the result exactly symmetric
  }
  return std::clamp(d, 0.0, 1.0);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0;
  const double m = mean(values);
  double ss = 0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace ccrm::stats
