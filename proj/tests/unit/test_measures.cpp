#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ccrm/measures.hpp"
#include "ccrm/rng.hpp"
#include "oracle/naive.hpp"
#include "oracle/random_snapshot.hpp"
#include "support/helpers.hpp"

using namespace ccrm;
using namespace ccrm::measures;
using corpus::AttentionMatrix;
using corpus::ConceptIds;

namespace {

corpus::CorpusSnapshot mini() { return corpus::load_snapshot(ccrm::testing::fixtures_dir() / "mini"); }

corpus::OwnershipMap diagonal_ownership(const std::vector<std::string>& languages,
                                        const std::vector<std::string>& cuisines) {
  corpus::OwnershipMap own;
  for (std::size_t i = 0; i < languages.size(); ++i) own.language_to_own_cuisines[languages[i]] = {cuisines[i]};
  return own;
}

// Two languages; "aa" owns "home", whose country borders three others.
struct RegionalWorld {
  std::vector<corpus::Cuisine> cuisines{{"home", "Home", {"HA"}}, {"n1", "N1", {"NA"}}, {"n2", "N2", {"NB"}},
                                        {"n3", "N3", {"NC"}},     {"f1", "F1", {"FA"}}, {"f2", "F2", {"FB"}}};
  corpus::AdjacencyMap adjacency;
  corpus::OwnershipMap ownership;
  AttentionMatrix attention;

  explicit RegionalWorld(bool third_neighbor = true) {
    adjacency.add("HA", "NA");
    adjacency.add("HA", "NB");
    if (third_neighbor) adjacency.add("HA", "NC");
    ownership.language_to_own_cuisines["aa"] = {"home"};
    ownership.language_to_own_cuisines["bb"] = {"f2"};
    attention = AttentionMatrix::from_rows({"aa", "bb"}, {"home", "n1", "n2", "n3", "f1", "f2"},
                                           {{2, 2, 2, 2, 1, 1}, {1, 1, 1, 1, 1, 1}});
  }
};

SimilarityMatrix similarity_of(const std::vector<std::string>& ids, const std::vector<std::vector<double>>& rows) {
  SimilarityMatrix m{LabeledMatrix(ids, ids), Perspective::Global};
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = 0; j < ids.size(); ++j) m.scores.at(i, j) = rows[i][j];
  return m;
}

}  // namespace

TEST_CASE("jaccard examples") {
  CHECK(jaccard({"Wine", "Cheese", "Baguette"}, {"Wine", "Pasta", "Cheese"}) == 0.5);
  CHECK(jaccard({"a", "b"}, {"a", "b"}) == 1.0);
  CHECK(jaccard({"a", "b"}, {"c"}) == 0.0);
  CHECK(jaccard({}, {}) == 0.0);
  CHECK(jaccard({"a"}, {}) == 0.0);
}

TEST_CASE("jaccard is symmetric, bounded and 1 only on equal nonempty sets") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    ConceptIds a, b;
    for (int q = 0; q < 6; ++q) {
      if (rng.uniform_open() < 0.5) a.insert("Q" + std::to_string(q));
      if (rng.uniform_open() < 0.5) b.insert("Q" + std::to_string(q));
    }
    const double j = jaccard(a, b);
    CHECK(j == jaccard(b, a));
    CHECK(j >= 0.0);
    CHECK(j <= 1.0);
    CHECK((j == 1.0) == (a == b && !a.empty()));
    if (!a.empty()) CHECK(jaccard(a, a) == 1.0);
    CHECK(j == doctest::Approx(oracle::jaccard(a, b)).epsilon(1e-15));
  }
}

TEST_CASE("global similarity on the fixture") {
  const auto s = mini();
  const auto sim = cultural_similarity(s, Perspective::Global);
  CHECK(sim.scores.get("x", "y") == 0.5);
  CHECK(sim.scores.get("y", "x") == 0.5);
  CHECK(sim.scores.get("x", "x") == 1.0);
  // Brute force: union of x over all languages {Q1..Q8}, of y {Q1..Q6, Q9..Q12}.
  const ConceptIds ux{"Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7", "Q8"};
  const ConceptIds uy{"Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q9", "Q10", "Q11", "Q12"};
  CHECK(oracle::jaccard(ux, uy) == 0.5);
}

TEST_CASE("native similarity uses owner-language articles only") {
  const auto s = mini();
  const auto sim = cultural_similarity(s, Perspective::Native);
  // Native x is aa's article, native y is bb's.
  const auto expected = oracle::jaccard(s.find_article("aa", "x")->concepts, s.find_article("bb", "y")->concepts);
  CHECK(sim.scores.get("x", "y") == expected);
  CHECK(sim.perspective == Perspective::Native);
}

TEST_CASE("cuisine without any article has an all-missing row") {
  auto s = mini();
  s.cuisines.push_back({"q", "Nowhere cuisine", {"QA"}});
  s.ownership.language_to_own_cuisines["aa"].insert("q");
  s.canonicalize();
  s.validate();
  for (auto p : {Perspective::Global, Perspective::Native}) {
    const auto sim = cultural_similarity(s, p);
    const auto r = *sim.scores.row_index("q");
    for (std::size_t c = 0; c < sim.scores.cols(); ++c) {
      CHECK_FALSE(sim.scores.at(r, c));
      CHECK_FALSE(sim.scores.at(c, r));
    }
  }
}

TEST_CASE("similarity matrices are symmetric with unit diagonal") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = oracle::random_snapshot(seed);
    for (auto p : {Perspective::Global, Perspective::Native}) {
      const auto& m = cultural_similarity(s, p).scores;
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (m.at(i, i)) CHECK(*m.at(i, i) == 1.0);
        for (std::size_t j = 0; j < m.cols(); ++j) {
          CHECK(m.at(i, j) == m.at(j, i));
          if (m.at(i, j)) {
            CHECK(*m.at(i, j) >= 0.0);
            CHECK(*m.at(i, j) <= 1.0);
          }
        }
      }
    }
  }
}

TEST_CASE("understanding on the fixture") {
  const auto s = mini();
  const auto u = cultural_understanding(s);
  CHECK(u.scores.get("aa", "z") == 0.25);
  CHECK(u.scores.get("dd", "z") == 1.0);
  CHECK_FALSE(u.scores.get("dd", "x"));
  // Present but empty article: defined, and zero.
  CHECK(u.scores.get("bb", "w") == 0.0);
}

TEST_CASE("understanding references the union of owner-language articles") {
  corpus::CorpusSnapshot s;
  s.languages = {{"de", "German", 10}, {"fr", "French", 10}, {"it", "Italian", 10}};
  s.cuisines = {{"austrian", "Austrian", {"AT"}}, {"german", "German", {"DE"}}};
  s.ownership.language_to_own_cuisines = {{"de", {"austrian", "german"}}, {"fr", {"german"}}, {"it", {"austrian"}}};
  s.concept_sets = {{"de", "german", {"a", "b"}}, {"fr", "german", {"c"}}, {"it", "german", {"a", "c", "d"}}};
  s.canonicalize();
  s.validate();
  const auto native = native_description(s, "german");
  REQUIRE(native);
  CHECK(*native == ConceptIds{"a", "b", "c"});
  CHECK_FALSE(native_description(s, "austrian"));
  const auto u = cultural_understanding(s);
  CHECK(u.scores.get("it", "german") == 0.5);
  CHECK_FALSE(u.scores.get("de", "austrian"));
}

TEST_CASE("similarity and understanding ignore how concepts are named") {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    const auto s = oracle::random_snapshot(seed);
    auto renamed = s;
    for (auto& cs : renamed.concept_sets) {
      ConceptIds out;
      for (const auto& c : cs.concepts) out.insert("zz" + std::string(c.rbegin(), c.rend()) + "!");
      cs.concepts = out;
    }
    for (auto p : {Perspective::Global, Perspective::Native})
      CHECK(cultural_similarity(s, p).scores == cultural_similarity(renamed, p).scores);
    CHECK(cultural_understanding(s).scores == cultural_understanding(renamed).scores);
  }
}

TEST_CASE("a different set similarity can be plugged in") {
  const auto overlap = [](const ConceptIds& a, const ConceptIds& b) {
    if (a.empty() || b.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& x : a) common += b.count(x);
    return static_cast<double>(common) / static_cast<double>(std::min(a.size(), b.size()));
  };
  const auto s = mini();
  const auto u = cultural_understanding(s, overlap);
  CHECK(u.scores.get("aa", "z") == 0.5);
}

TEST_CASE("bias examples") {
  const auto uniform = AttentionMatrix::from_rows({"L1", "L2"}, {"R1", "R2"}, {{1, 1}, {1, 1}});
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t o = 0; o < 2; ++o) CHECK(bias(uniform, l, o) == 0.0);

  const auto three = AttentionMatrix::from_rows({"L1", "L2", "L3"}, {"R1", "R2"}, {{3, 1}, {1, 1}, {1, 1}});
  CHECK(bias(three, "L1", "R1") == doctest::Approx(0.25).epsilon(1e-15));

  const auto extreme = AttentionMatrix::from_rows({"L1", "L2"}, {"R1", "R2"}, {{1, 0}, {0, 1}});
  CHECK(bias(extreme, "L1", "R1") == 1.0);
  CHECK(bias(extreme, "L1", "R2") == -1.0);
}

TEST_CASE("languages with no attention are left out of the baseline") {
  const auto m = AttentionMatrix::from_rows({"L1", "L2", "L3"}, {"R1", "R2"}, {{3, 1}, {1, 1}, {0, 0}});
  CHECK(bias(m, "L1", "R1") == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(bias(m, "L3", "R1"), UndefinedBias);
  const auto b = bias_matrix(m);
  CHECK_FALSE(b.values.get("L3", "R1"));
  CHECK(*b.values.get("L1", "R1") == doctest::Approx(0.25).epsilon(1e-15));

  const auto lonely = AttentionMatrix::from_rows({"L1", "L2"}, {"R1"}, {{4}, {0}});
  CHECK_THROWS_AS(bias(lonely, "L1", "R1"), UndefinedBias);
  CHECK_THROWS_AS(bias(lonely, "L9", "R1"), UndefinedBias);
}

TEST_CASE("bias_matrix agrees with the cell formula and leaves absent articles missing") {
  const auto s = mini();
  const auto a = corpus::attention_matrix(s, corpus::AttentionSource::Views);
  const auto b = bias_matrix(a);
  for (std::size_t l = 0; l < a.language_count(); ++l)
    for (std::size_t o = 0; o < a.cuisine_count(); ++o) {
      if (a.is_missing(l, o)) {
        CHECK_FALSE(b.values.at(l, o));
      } else {
        REQUIRE(b.values.at(l, o));
        CHECK(*b.values.at(l, o) == doctest::Approx(bias(a, l, o)).epsilon(1e-14));
      }
    }
}

TEST_CASE("bias identities on random positive matrices") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto rows = oracle::random_positive_rows(seed);
    std::vector<std::string> ls, os;
    for (std::size_t i = 0; i < rows.size(); ++i) ls.push_back("l" + std::to_string(i));
    for (std::size_t i = 0; i < rows[0].size(); ++i) os.push_back("o" + std::to_string(i));
    const auto b = bias_matrix(AttentionMatrix::from_rows(ls, os, rows));

    Rng rng(seed + 1000);
    auto scaled = rows;
    for (auto& r : scaled) {
      const double k = std::exp((rng.uniform_open() - 0.5) * 10);
      for (auto& v : r) v *= k;
    }
    const auto bs = bias_matrix(AttentionMatrix::from_rows(ls, os, scaled));

    for (std::size_t o = 0; o < os.size(); ++o) {
      double column = 0;
      for (std::size_t l = 0; l < ls.size(); ++l) {
        const double v = *b.values.at(l, o);
        column += v;
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
        CHECK(std::abs(v - *bs.values.at(l, o)) <= 1e-12);
      }
      CHECK(std::abs(column) < 1e-9);
    }
  }
}

TEST_CASE("self-focus examples") {
  const auto own = diagonal_ownership({"L1", "L2"}, {"R1", "R2"});
  const auto extreme = bias_matrix(AttentionMatrix::from_rows({"L1", "L2"}, {"R1", "R2"}, {{1, 0}, {0, 1}}));
  CHECK(self_focus(extreme, own, "L1", 1) == 2.0);
  CHECK(self_focus(extreme, own, "L2", 1) == 2.0);
  CHECK_FALSE(self_focus(extreme, own, "L1", 3));

  const auto uniform = bias_matrix(AttentionMatrix::from_rows({"L1", "L2"}, {"R1", "R2"}, {{5, 5}, {2, 2}}));
  CHECK(std::abs(*self_focus(uniform, own, "L1", 1)) <= 1e-12);
  CHECK_FALSE(self_focus(uniform, own, "L9", 1));
}

TEST_CASE("self-focus needs both an own and an other cuisine") {
  corpus::OwnershipMap own;
  own.language_to_own_cuisines["L1"] = {"R1", "R2"};
  own.language_to_own_cuisines["L2"] = {"R1"};
  const auto b = bias_matrix(AttentionMatrix::from_rows({"L1", "L2"}, {"R1", "R2"}, {{1, 3}, {2, 1}}));
  CHECK_FALSE(self_focus(b, own, "L1", 1));
  CHECK(self_focus(b, own, "L2", 1));
}

TEST_CASE("dominant own share gives positive self-focus") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto n = 3 + rng.uniform_index(4);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (std::size_t l = 0; l < n; ++l) {
      double others = 0;
      for (std::size_t o = 0; o < n; ++o)
        if (o != l) others += rows[l][o] = rng.exponential(1.0);
      rows[l][l] = others * (0.5 + rng.uniform_open() * 5);
    }
    const auto a = AttentionMatrix::from_rows(ids, ids, rows);
    // Only keep matrices meeting the premise.
    bool premise = true;
    for (std::size_t o = 0; o < n; ++o)
      for (std::size_t m = 0; m < n; ++m)
        if (m != o && a.at(m, o) / a.row_total(m) >= a.at(o, o) / a.row_total(o)) premise = false;
    if (!premise) continue;
    const auto b = bias_matrix(a);
    const auto own = diagonal_ownership(ids, ids);
    for (const auto& l : ids) CHECK(*self_focus(b, own, l, 1) > 0);
  }
}

TEST_CASE("regional bias examples") {
  SUBCASE("attention leaning toward neighbors") {
    RegionalWorld w;
    const Geography g(w.cuisines, w.adjacency);
    const auto b = bias_matrix(w.attention);
    // Shares of aa: neighbors 0.2, far 0.1; bb gives 1/6 to everything.
    const double expected = (0.2 - 1.0 / 6) - (0.1 - 1.0 / 6);
    CHECK(*regional_bias(b, w.ownership, g, "aa", 3) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(*regional_bias(b, w.ownership, g, "aa", 3) > 0);
  }
  SUBCASE("uniform attention") {
    RegionalWorld w;
    w.attention = AttentionMatrix::from_rows(w.attention.languages, w.attention.cuisines,
                                             {{1, 1, 1, 1, 1, 1}, {3, 3, 3, 3, 3, 3}});
    const Geography g(w.cuisines, w.adjacency);
    CHECK(std::abs(*regional_bias(bias_matrix(w.attention), w.ownership, g, "aa", 3)) <= 1e-12);
  }
  SUBCASE("two neighbors are below the threshold") {
    RegionalWorld w(false);
    const Geography g(w.cuisines, w.adjacency);
    const auto b = bias_matrix(w.attention);
    CHECK_FALSE(regional_bias(b, w.ownership, g, "aa", 3));
    CHECK(regional_bias(b, w.ownership, g, "aa", 2));
  }
}

TEST_CASE("cuisines sharing a country count as neighbors") {
  const std::vector<corpus::Cuisine> cs{{"english", "English", {"GB"}}, {"british", "British", {"GB"}},
                                        {"irish", "Irish", {"IE"}}, {"greek", "Greek", {"GR"}}};
  corpus::AdjacencyMap adj;
  adj.add("GB", "IE");
  const Geography g(cs, adj);
  CHECK(g.cuisines_adjacent("english", "british"));
  CHECK(g.cuisines_adjacent("irish", "english"));
  CHECK_FALSE(g.cuisines_adjacent("greek", "english"));
  CHECK_FALSE(g.cuisines_adjacent("irish", "irish"));
  CHECK_FALSE(g.neighbors_any({"english"}, "english"));
  CHECK(g.neighbors_any({"greek", "english"}, "irish"));
}

TEST_CASE("neighbor similarity ratio examples") {
  const std::vector<corpus::Cuisine> cs{{"c", "C", {"CA"}}, {"n1", "N1", {"NA"}}, {"n2", "N2", {"NB"}},
                                        {"n3", "N3", {"NC"}}, {"f1", "F1", {"FA"}}, {"f2", "F2", {"FB"}}};
  corpus::AdjacencyMap adj;
  for (const char* n : {"NA", "NB", "NC"}) adj.add("CA", n);
  const Geography g(cs, adj);
  const std::vector<std::string> ids{"c", "n1", "n2", "n3", "f1", "f2"};

  std::vector<std::vector<double>> constant(6, std::vector<double>(6, 0.3));
  CHECK(*neighbor_similarity_ratio(similarity_of(ids, constant), "c", g, 3) == doctest::Approx(1.0).epsilon(1e-15));

  auto rows = constant;
  for (std::size_t j = 1; j <= 3; ++j) rows[0][j] = rows[j][0] = 0.2;
  rows[0][4] = rows[4][0] = 0.05;
  rows[0][5] = rows[5][0] = 0.15;
  CHECK(*neighbor_similarity_ratio(similarity_of(ids, rows), "c", g, 3) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(neighbor_similarity_ratio(similarity_of(ids, rows), "c", g, 4));

  rows[0][4] = rows[4][0] = 0.0;
  rows[0][5] = rows[5][0] = 0.0;
  CHECK_FALSE(neighbor_similarity_ratio(similarity_of(ids, rows), "c", g, 3));
}

TEST_CASE("coverage counts on the fixture") {
  auto s = mini();
  const std::vector<CoverageRow> expected{{"aa", 4000, 4}, {"bb", 3000, 3}, {"cc", 2000, 3}, {"dd", 1000, 2}};
  CHECK(coverage_stats(s) == expected);
  s.languages.push_back({"ee", "Epsilon", 10});
  s.ownership.language_to_own_cuisines["ee"] = {"x"};
  s.canonicalize();
  s.validate();
  CHECK(coverage_stats(s).back() == CoverageRow{"ee", 10, 0});
}

TEST_CASE("description agreement lists every pair of editions, highest first") {
  const auto agreement = description_agreement(mini());
  const auto& x = agreement.at("x");
  REQUIRE(x.size() == 3);
  CHECK(x[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(x[1] == 0.25);
  CHECK(x[2] == doctest::Approx(1.0 / 7).epsilon(1e-15));
  CHECK(agreement.at("w").size() == 1);
}

TEST_CASE("summaries honor thresholds") {
  const auto s = mini();
  const auto b = bias_matrix(corpus::attention_matrix(s, corpus::AttentionSource::Views));
  const auto loose = summarize_biases(b, s, {1, 1});
  const auto strict = summarize_biases(b, s, {5, 5});
  REQUIRE(loose.size() == 4);
  for (const auto& row : strict) {
    CHECK_FALSE(row.self_focus);
    CHECK_FALSE(row.regional);
  }
  for (const auto& row : loose)
    if (row.self_focus) {
      CHECK(*row.self_focus >= -2.0);
      CHECK(*row.self_focus <= 2.0);
    }
}
