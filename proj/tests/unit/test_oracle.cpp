// Library measures against the brute-force versions in oracle/.

#include <doctest.h>

#include <cmath>

#include "ccrm/measures.hpp"
#include "ccrm/rng.hpp"
#include "ccrm/stats.hpp"
#include "oracle/naive.hpp"
#include "oracle/random_snapshot.hpp"

using namespace ccrm;
using namespace ccrm::measures;

namespace {

constexpr double kTol = 1e-12;

bool same(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) <= kTol;
}

bool matches(const LabeledMatrix& m, const oracle::Cells& cells) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto it = cells.find({m.row_labels()[r], m.col_labels()[c]});
      if (it == cells.end() || !same(m.at(r, c), it->second)) return false;
      ++n;
    }
  return n == cells.size();
}

}  // namespace

TEST_CASE("oracle agrees with the hand examples") {
  CHECK(oracle::jaccard({"Wine", "Cheese", "Baguette"}, {"Wine", "Pasta", "Cheese"}) == 0.5);
  CHECK(oracle::spearman_no_ties({1, 2, 3}, {1, 3, 2}) == 0.5);
  CHECK(oracle::spearman_rho({1, 2, 3}, {1, 3, 2}) == doctest::Approx(0.5).epsilon(1e-15));
  const auto b = oracle::bias_rows({{3, 1}, {1, 1}, {1, 1}});
  CHECK(b[0][0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("every measure matches the brute-force version on random snapshots") {
  int checked_regional = 0, checked_ratio = 0, checked_self = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CAPTURE(seed);
    const auto s = oracle::random_snapshot(seed);
    const auto langs = s.language_codes();
    const auto ids = s.cuisine_ids();

    const auto global = cultural_similarity(s, Perspective::Global);
    const auto native = cultural_similarity(s, Perspective::Native);
    const auto naive_global = oracle::similarity(s, true);
    CHECK(matches(global.scores, naive_global));
    CHECK(matches(native.scores, oracle::similarity(s, false)));
    CHECK(matches(cultural_understanding(s).scores, oracle::understanding(s)));

    for (auto source : {corpus::AttentionSource::Views, corpus::AttentionSource::Outlinks}) {
      const auto naive_bias =
          oracle::bias(oracle::attention(s, source == corpus::AttentionSource::Views), langs, ids);
      const auto b = bias_matrix(corpus::attention_matrix(s, source));
      CHECK(matches(b.values, naive_bias));
      for (int threshold = 1; threshold <= 3; ++threshold) {
        for (const auto& l : langs) {
          const auto sf = self_focus(b, s.ownership, l, threshold);
          CHECK(same(sf, oracle::self_focus(naive_bias, s, l, threshold)));
          const auto rb = regional_bias(b, s.ownership, Geography(s), l, threshold);
          CHECK(same(rb, oracle::regional(naive_bias, s, l, threshold)));
          checked_self += sf.has_value();
          checked_regional += rb.has_value();
        }
      }
    }
    for (int threshold = 1; threshold <= 3; ++threshold)
      for (const auto& c : ids) {
        const auto r = neighbor_similarity_ratio(global, c, Geography(s), threshold);
        CHECK(same(r, oracle::neighbor_ratio(naive_global, s, c, threshold)));
        checked_ratio += r.has_value();
      }
    for (const auto& a : ids)
      for (const auto& b : ids)
        CHECK(measures::cultural_similarity(s, Perspective::Global).scores.get(a, b).has_value() ==
              naive_global.at({a, b}).has_value());
  }
  // The generator must reach the defined branches, not only the missing ones.
  CHECK(checked_self > 100);
  CHECK(checked_regional > 20);
  CHECK(checked_ratio > 20);
}

TEST_CASE("spearman matches the rank oracle with ties") {
  Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    const auto n = 3 + rng.uniform_index(18);
    std::vector<double> x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = static_cast<double>(rng.uniform_index(6));
      y[k] = static_cast<double>(rng.uniform_index(6));
    }
    const double expected = oracle::spearman_rho(x, y);
    if (!std::isfinite(expected)) {
      CHECK_THROWS_AS(stats::spearman(x, y, {1, 0, 1}), stats::ConstantInput);
      continue;
    }
    CHECK(std::abs(stats::spearman(x, y, {1, 0, 1}).rho - expected) <= 1e-9);
  }
}
