#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccrm/rng.hpp"
#include "ccrm/stats.hpp"
#include "oracle/naive.hpp"

using namespace ccrm;
using namespace ccrm::stats;

namespace {

double direct_jsd(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = (p[i] + q[i]) / 2;
    if (p[i] > 0) d += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0) d += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return d;
}

std::vector<double> random_distribution(Rng& rng, std::size_t n, bool zeros) {
  std::vector<double> p(n);
  for (auto& v : p) v = (zeros && rng.uniform_open() < 0.3) ? 0.0 : rng.uniform_open();
  if (std::accumulate(p.begin(), p.end(), 0.0) == 0) p[0] = 1;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  return p;
}

}  // namespace

TEST_CASE("spearman examples") {
  const std::vector<double> x{1, 2, 3};
  CHECK(spearman(x, std::vector<double>{10, 20, 30}).rho == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(x, std::vector<double>{3, 2, 1}).rho == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(spearman(x, std::vector<double>{1, 3, 2}).rho == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("spearman preconditions") {
  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(spearman(two, two), InsufficientData);
  const std::vector<double> a{1, 2, 3}, b{1, 2, 3, 4};
  CHECK_THROWS_AS(spearman(a, b), InsufficientData);
  const std::vector<double> flat{4, 4, 4};
  CHECK_THROWS_AS(spearman(a, flat), ConstantInput);
}

TEST_CASE("midranks average over ties") {
  const std::vector<double> v{10, 20, 20, 5, 20};
  CHECK(midranks(v) == std::vector<double>{2, 4, 4, 1, 4});
}

TEST_CASE("spearman matches the textbook formula on tie-free data") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto n = 3 + rng.uniform_index(18);
    std::vector<double> x(n), y(n);
    std::iota(x.begin(), x.end(), 0.0);
    std::iota(y.begin(), y.end(), 0.0);
    rng.shuffle(x.begin(), x.end());
    rng.shuffle(y.begin(), y.end());
    CHECK(std::abs(spearman(x, y, {1}).rho - oracle::spearman_no_ties(x, y)) <= 1e-9);
  }
}

TEST_CASE("spearman is invariant under increasing transforms and bounded") {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto n = 3 + rng.uniform_index(30);
    std::vector<double> x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = rng.uniform_open() * 10 - 5;
      y[k] = std::floor(rng.uniform_open() * 4);
    }
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) continue;
    const double rho = spearman(x, y, {1}).rho;
    CHECK(rho >= -1.0 - 1e-15);
    CHECK(rho <= 1.0 + 1e-15);
    std::vector<double> tx(n), ty(n);
    for (std::size_t k = 0; k < n; ++k) {
      tx[k] = std::exp(x[k]);
      ty[k] = 3 * y[k] * y[k] * y[k] + 1;
    }
    CHECK(std::abs(spearman(tx, ty, {1}).rho - rho) <= 1e-12);
    CHECK(std::abs(spearman(y, x, {1}).rho - rho) <= 1e-12);
    CHECK(spearman(x, x, {1}).rho == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("permutation p-value is seeded and independent of worker count") {
  Rng rng(4);
  std::vector<double> x(25), y(25);
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = rng.uniform_open();
    y[k] = x[k] + rng.uniform_open();
  }
  const auto one = spearman(x, y, {2000, 9, 1});
  const auto four = spearman(x, y, {2000, 9, 4});
  const auto again = spearman(x, y, {2000, 9, 3});
  CHECK(one.p_value == four.p_value);
  CHECK(one.p_value == again.p_value);
  CHECK(one.p_value < 0.01);
  CHECK(one.p_value >= 1.0 / 2001);

  // Unrelated data: p-value should not be tiny.
  std::vector<double> z(25);
  for (auto& v : z) v = rng.uniform_open();
  const auto null = spearman(x, z, {2000, 9, 2});
  CHECK(null.p_value > 0.0);
  CHECK(null.p_value <= 1.0);
}

TEST_CASE("ranked pair lists sort descending and keep tie order") {
  RankedPairList r("s", {{"a", 1}, {"b", 3}, {"c", 1}, {"d", 2}});
  CHECK(r.pairs()[0].first == "b");
  CHECK(r.pairs()[1].first == "d");
  CHECK(r.pairs()[2].first == "a");
  CHECK(r.pairs()[3].first == "c");
  CHECK(r.ranks() == std::vector<double>{1, 2, 3.5, 3.5});
  CHECK_THROWS_AS(RankedPairList("s", {{"a", 1}, {"a", 2}}), Error);
  CHECK_THROWS_AS(RankedPairList("s", {{"a", NAN}}), Error);
}

TEST_CASE("align_rankings examples") {
  RankedPairList a("a", {{"k1", 5}, {"k2", 4}, {"k3", 3}, {"k4", 2}, {"k5", 1}});
  RankedPairList b("b", {{"k1", 9}, {"k3", 8}, {"k5", 7}, {"x", 6}, {"y", 5}});
  const std::vector<RankedPairList> ab{a, b};
  const auto t = align_rankings(ab);
  CHECK(t.keys == std::vector<std::string>{"k1", "k3", "k5"});
  CHECK(t.sources == std::vector<std::string>{"a", "b"});
  CHECK(t.ranks[0] == std::vector<double>{1, 3, 5});
  CHECK(t.ranks[1] == std::vector<double>{1, 2, 3});
  CHECK(t.contributed == std::vector<std::size_t>{5, 5});

  const std::vector<RankedPairList> same{a, a};
  const auto s = align_rankings(same);
  CHECK(s.ranks[0] == s.ranks[1]);
  CHECK(spearman(s.ranks[0], s.ranks[1], {10}).rho == doctest::Approx(1.0).epsilon(1e-15));

  RankedPairList c("c", {{"z1", 1}, {"z2", 2}});
  const std::vector<RankedPairList> disjoint{a, c};
  CHECK_THROWS_AS(align_rankings(disjoint), EmptyIntersection);
  const std::vector<RankedPairList> lone{a};
  CHECK_THROWS_AS(align_rankings(lone), InsufficientData);
}

TEST_CASE("histogram examples") {
  const HistogramSpec two{0, 1, 2, 0};
  const std::vector<double> one_bin{0.1, 0.2, 0.3};
  CHECK(histogram(one_bin, two) == std::vector<double>{1, 0});
  const std::vector<double> split{0.1, 0.2, 0.6, 0.9};
  CHECK(histogram(split, two) == std::vector<double>{0.5, 0.5});

  // One value, four bins, epsilon 1: counts (1+1, 1, 1, 1) over 5.
  const HistogramSpec four{0, 1, 4, 1};
  const std::vector<double> single{0.1};
  const auto h = histogram(single, four);
  CHECK(h[0] == doctest::Approx(0.4).epsilon(1e-15));
  for (int i = 1; i < 4; ++i) CHECK(h[i] == doctest::Approx(0.2).epsilon(1e-15));

  const std::vector<double> none;
  CHECK_THROWS_AS(histogram(none, four), InsufficientData);
}

TEST_CASE("histogram edges and clamping") {
  const HistogramSpec spec{-1, 1, 4, 0};
  const std::vector<double> edges{-1, 1, -5, 7, 0};
  const auto h = histogram(edges, spec);
  CHECK(h == std::vector<double>{0.4, 0, 0.2, 0.4});
}

TEST_CASE("histogram spec validation") {
  CHECK_THROWS_AS((HistogramSpec{1, 1, 4, 0}.validate()), Error);
  CHECK_THROWS_AS((HistogramSpec{0, 1, 1, 0}.validate()), Error);
  CHECK_THROWS_AS((HistogramSpec{0, 1, 4, -1}.validate()), Error);
  CHECK_NOTHROW(HistogramSpec{}.validate());
}

TEST_CASE("histograms always sum to one") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const HistogramSpec spec{-1, 1, 2 + rng.uniform_index(60), rng.uniform_open() < 0.5 ? 0.0 : 1e-6};
    std::vector<double> v(1 + rng.uniform_index(300));
    for (auto& x : v) x = rng.uniform_open() * 2 - 1;
    const auto h = histogram(v, spec);
    CHECK(std::abs(std::accumulate(h.begin(), h.end(), 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("js divergence examples") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  CHECK(js_divergence(p, p) == 0.0);
  const std::vector<double> a{1, 0}, b{0, 1};
  CHECK(js_divergence(a, b) == 1.0);
  CHECK(js_divergence(p, q) == doctest::Approx(0.0488).epsilon(1e-4 / 0.0488));
  CHECK(js_divergence(p, q) == doctest::Approx(direct_jsd(p, q)).epsilon(1e-14));
}

TEST_CASE("js divergence preconditions") {
  const std::vector<double> p{0.5, 0.5}, three{0.2, 0.3, 0.5}, bad{0.5, 0.6}, neg{1.5, -0.5};
  CHECK_THROWS_AS(js_divergence(p, three), DimensionMismatch);
  CHECK_THROWS_AS(js_divergence(p, bad), NotNormalized);
  CHECK_THROWS_AS(js_divergence(neg, p), NotNormalized);
}

TEST_CASE("js divergence is symmetric, bounded and zero only on equal inputs") {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const auto n = 2 + rng.uniform_index(20);
    const auto p = random_distribution(rng, n, true);
    const auto q = random_distribution(rng, n, true);
    const double d = js_divergence(p, q);
    CHECK(d == js_divergence(q, p));
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    CHECK(d == doctest::Approx(direct_jsd(p, q)).epsilon(1e-12));
    CHECK(js_divergence(p, p) == 0.0);
    if (p != q) CHECK(d > 0.0);
  }
}

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(v) == 5.0);
  CHECK(sample_stddev(v) == doctest::Approx(std::sqrt(32.0 / 7)).epsilon(1e-15));
}
