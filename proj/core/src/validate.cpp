#include "ccrm/validate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ccrm/tsv.hpp"
#include "json.hpp"

namespace ccrm::validate {

namespace fs = std::filesystem;
using corpus::InvariantViolation;
using nlohmann::json;
using stats::RankedPairList;

bool is_country_pair_key(std::string_view key) {
  if (key.size() != 5 || key[2] != '|') return false;
  return corpus::is_valid_country_code(key.substr(0, 2)) && corpus::is_valid_country_code(key.substr(3, 2));
}

namespace {

std::string reversed_key(std::string_view key) {
  const auto bar = key.find('|');
  return fmt::format("{}|{}", key.substr(bar + 1), key.substr(0, bar));
}

std::pair<std::string, std::string> split_pair(std::string_view key) {
  const auto bar = key.find('|');
  if (bar == std::string_view::npos || bar == 0 || bar + 1 == key.size() || key.find('|', bar + 1) != key.npos) {
    throw InvariantViolation(fmt::format("pair key '{}' is not of the form a|b", key));
  }
  return {std::string(key.substr(0, bar)), std::string(key.substr(bar + 1))};
}

RankedPairList averaged(std::string label, const std::map<std::string, std::vector<double>>& cells) {
  std::vector<std::pair<std::string, double>> pairs;
  for (const auto& [key, values] : cells) pairs.emplace_back(key, stats::mean(values));
  return RankedPairList(std::move(label), std::move(pairs));
}

}  // namespace

ExternalRanking make_external_ranking(std::string label, bool directed,
                                      const std::vector<std::pair<std::string, double>>& rows) {
  std::map<std::string, double> scores;
  for (const auto& [key, score] : rows) {
    if (!is_country_pair_key(key)) throw InvariantViolation(fmt::format("ranking '{}': bad pair key '{}'", label, key));
    if (key.substr(0, 2) == key.substr(3, 2)) {
      throw InvariantViolation(fmt::format("ranking '{}': self pair '{}'", label, key));
    }
    if (!std::isfinite(score)) throw InvariantViolation(fmt::format("ranking '{}': non-finite score for '{}'", label, key));
    if (!scores.emplace(key, score).second) {
      throw InvariantViolation(fmt::format("ranking '{}': duplicate key '{}'", label, key));
    }
  }
  if (!directed) {
    std::map<std::string, double> both = scores;
    for (const auto& [key, score] : scores) {
      const auto rev = reversed_key(key);
      if (auto it = scores.find(rev); it != scores.end() && it->second != score) {
        throw InvariantViolation(
            fmt::format("ranking '{}' is marked undirected but '{}' and '{}' differ", label, key, rev));
      }
      both.emplace(rev, score);
    }
    scores = std::move(both);
  }
  std::vector<std::pair<std::string, double>> pairs(scores.begin(), scores.end());
  ExternalRanking out{label, directed, RankedPairList(label, std::move(pairs))};
  return out;
}

ExternalRanking load_external_ranking(const fs::path& path) {
  if (!fs::exists(path)) throw corpus::MissingFile(path);
  std::string label = path.stem().string();
  bool directed = false;
  const auto meta = path.parent_path() / (path.stem().string() + ".meta.json");
  if (fs::exists(meta)) {
    try {
      const auto j = json::parse(tsv::read_file(meta));
      label = j.value("label", label);
      directed = j.value("directed", false);
    } catch (const json::exception& e) {
      throw ParseError(meta.filename().string(), 1, 1, e.what());
    }
  }
  static constexpr std::string_view kHeader[] = {"key", "score"};
  const auto table = tsv::parse(tsv::read_file(path), kHeader, path.filename().string());
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& row : table.rows) {
    if (!is_country_pair_key(row.fields[0])) {
      throw ParseError(table.source, row.line, 1, fmt::format("'{}' is not a country pair key AA|BB", row.fields[0]));
    }
    rows.emplace_back(row.fields[0], tsv::parse_double(row, 1, table.source));
  }
  try {
    return make_external_ranking(label, directed, rows);
  } catch (const InvariantViolation& e) {
    throw ParseError(table.source, 1, 1, e.what());
  }
}

void save_external_ranking(const ExternalRanking& ranking, const fs::path& path) {
  std::string text = "key\tscore\n";
  for (const auto& [key, score] : ranking.pairs.pairs()) {
    if (!ranking.directed && key.substr(3, 2) < key.substr(0, 2)) continue;
    text += key + "\t" + tsv::format_double(score) + "\n";
  }
  tsv::write_file(path, text);
  json meta{{"label", ranking.label}, {"directed", ranking.directed}};
  tsv::write_file(path.parent_path() / (path.stem().string() + ".meta.json"), meta.dump(2) + "\n");
}

RankedPairList load_ranking(const fs::path& path) {
  if (!fs::exists(path)) throw corpus::MissingFile(path);
  static constexpr std::string_view kHeader[] = {"key", "score"};
  const auto table = tsv::parse(tsv::read_file(path), kHeader, path.filename().string());
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& row : table.rows) {
    try {
      split_pair(row.fields[0]);
    } catch (const InvariantViolation& e) {
      throw ParseError(table.source, row.line, 1, e.what());
    }
    const double score = tsv::parse_double(row, 1, table.source);
    if (!std::isfinite(score)) throw ParseError(table.source, row.line, 2, "score is not finite");
    rows.emplace_back(row.fields[0], score);
  }
  try {
    return RankedPairList(path.stem().string(), std::move(rows));
  } catch (const Error& e) {
    throw ParseError(table.source, 1, 1, e.what());
  }
}

void save_ranking(const RankedPairList& ranking, const fs::path& path) {
  std::string text = "key\tscore\n";
  for (const auto& [key, score] : ranking.pairs()) text += key + "\t" + tsv::format_double(score) + "\n";
  tsv::write_file(path, text);
}

DirectedRanking understanding_ranking(const measures::UnderstandingMatrix& understanding,
                                      const corpus::CorpusSnapshot& snapshot, std::string label) {
  const auto& m = understanding.scores;
  auto countries_of = [&](std::string_view cuisine) -> std::vector<std::string> {
    const auto* c = snapshot.find_cuisine(cuisine);
    return c ? c->country_codes : std::vector<std::string>{};
  };

  DirectedRanking out;
  std::map<std::string, std::vector<double>> cells;
  for (std::size_t l = 0; l < m.rows(); ++l) {
    std::set<std::string> observer;
    for (const auto& own : snapshot.ownership.own(m.row_labels()[l]))
      for (auto& c : countries_of(own)) observer.insert(std::move(c));
    for (std::size_t o = 0; o < m.cols(); ++o) {
      const auto& v = m.at(l, o);
      if (!v) {
        ++out.cells_missing;
        continue;
      }
      bool used = false;
      for (const auto& from : observer)
        for (const auto& to : countries_of(m.col_labels()[o])) {
          if (from == to) continue;
          cells[from + "|" + to].push_back(*v);
          used = true;
        }
      if (used) ++out.cells_used;
    }
  }
  out.ranking = averaged(std::move(label), cells);
  return out;
}

RankedPairList similarity_ranking(const measures::SimilarityMatrix& similarity, std::string label) {
  const auto m = similarity.scores.sorted();
  std::vector<std::pair<std::string, double>> pairs;
  for (std::size_t a = 0; a < m.rows(); ++a) {
    const auto b0 = m.col_index(m.row_labels()[a]);
    for (std::size_t b = b0 ? *b0 + 1 : 0; b < m.cols(); ++b) {
      if (const auto& v = m.at(a, b); v && m.row_labels()[a] < m.col_labels()[b]) {
        pairs.emplace_back(m.row_labels()[a] + "|" + m.col_labels()[b], *v);
      }
    }
  }
  return RankedPairList(std::move(label), std::move(pairs));
}

// ---------------------------------------------------------------------------

const Comparison* CorrelationReport::find(std::string_view a, std::string_view b) const {
  for (const auto& c : comparisons)
    if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) return &c;
  return nullptr;
}

bool CorrelationReport::any_result() const {
  return std::any_of(comparisons.begin(), comparisons.end(), [](const auto& c) { return c.result.has_value(); });
}

namespace {

Comparison compare(const RankedPairList& a, const RankedPairList& b, const stats::PermutationOptions& options) {
  Comparison c{a.source_label(), b.source_label(), a.size(), b.size(), 0, std::nullopt, {}};
  const RankedPairList lists[] = {a, b};
  try {
    const auto aligned = stats::align_rankings(lists);
    c.common = aligned.keys.size();
    c.result = stats::spearman(aligned.ranks[0], aligned.ranks[1], options);
  } catch (const stats::EmptyIntersection& e) {
    c.error = e.what();
  } catch (const stats::InsufficientData& e) {
    c.error = e.what();
  } catch (const stats::ConstantInput& e) {
    c.error = e.what();
  }
  if (!c.result) spdlog::warn("correlation {} vs {}: {}", c.a, c.b, c.error);
  return c;
}

CorrelationReport all_pairs(const std::vector<const RankedPairList*>& lists, const stats::PermutationOptions& options) {
  CorrelationReport report;
  for (std::size_t i = 0; i < lists.size(); ++i)
    for (std::size_t j = i + 1; j < lists.size(); ++j) report.comparisons.push_back(compare(*lists[i], *lists[j], options));
  return report;
}

}  // namespace

CorrelationReport correlate_with_external(const RankedPairList& measure, const std::vector<ExternalRanking>& externals,
                                          const stats::PermutationOptions& options) {
  std::vector<const RankedPairList*> lists{&measure};
  for (const auto& e : externals) lists.push_back(&e.pairs);
  return all_pairs(lists, options);
}

MeasureRankings language_pair_rankings(const measures::SimilarityMatrix& similarity,
                                       const measures::UnderstandingMatrix& understanding,
                                       const measures::BiasMatrix& bias, const corpus::OwnershipMap& ownership) {
  std::map<std::string, std::vector<double>> sim_cells, und_cells, bias_cells;

  const auto& s = similarity.scores;
  for (std::size_t a = 0; a < s.rows(); ++a) {
    const auto owners_a = ownership.owners_of(s.row_labels()[a]);
    for (std::size_t b = 0; b < s.cols(); ++b) {
      const auto& v = s.at(a, b);
      if (!v || s.row_labels()[a] == s.col_labels()[b]) continue;
      for (const auto& la : owners_a)
        for (const auto& lb : ownership.owners_of(s.col_labels()[b]))
          if (la != lb) sim_cells[la + "|" + lb].push_back(*v);
    }
  }
  auto by_observer = [&](const LabeledMatrix& m, std::map<std::string, std::vector<double>>& cells) {
    for (std::size_t l = 0; l < m.rows(); ++l)
      for (std::size_t o = 0; o < m.cols(); ++o) {
        const auto& v = m.at(l, o);
        if (!v) continue;
        for (const auto& owner : ownership.owners_of(m.col_labels()[o]))
          if (owner != m.row_labels()[l]) cells[m.row_labels()[l] + "|" + owner].push_back(*v);
      }
  };
  by_observer(understanding.scores, und_cells);
  by_observer(bias.values, bias_cells);
  return {averaged("similarity", sim_cells), averaged("understanding", und_cells), averaged("affinity", bias_cells)};
}

CorrelationReport cross_measure_correlations(const measures::SimilarityMatrix& similarity,
                                             const measures::UnderstandingMatrix& understanding,
                                             const measures::BiasMatrix& bias, const corpus::OwnershipMap& ownership,
                                             const stats::PermutationOptions& options) {
  const auto r = language_pair_rankings(similarity, understanding, bias, ownership);
  return all_pairs({&r.similarity, &r.understanding, &r.affinity}, options);
}

// ---------------------------------------------------------------------------

std::vector<CrowdTask> generate_crowd_tasks(const RankedPairList& ranking, int k) {
  if (k < 1) throw InsufficientPairs(fmt::format("crowd tasks need k >= 1, got {}", k));
  const auto kk = static_cast<std::size_t>(k);
  if (ranking.size() < 2 * kk) {
    throw InsufficientPairs(fmt::format("crowd tasks with k={} need {} ranked pairs, got {}", k, 2 * kk, ranking.size()));
  }
  const auto& pairs = ranking.pairs();
  std::vector<CrowdTask> tasks;
  tasks.reserve(kk * kk);
  const auto width = std::to_string(kk * kk).size();
  for (std::size_t h = 0; h < kk; ++h) {
    const auto [ha, hb] = split_pair(pairs[h].first);
    for (std::size_t l = 0; l < kk; ++l) {
      const auto [la, lb] = split_pair(pairs[pairs.size() - 1 - l].first);
      tasks.push_back({fmt::format("t{:0{}}", tasks.size() + 1, width), ha, hb, la, lb});
    }
  }
  return tasks;
}

std::string crowd_tasks_tsv(const std::vector<CrowdTask>& tasks) {
  std::string out = "task_id\thigh_a\thigh_b\tlow_a\tlow_b\n";
  for (const auto& t : tasks) out += fmt::format("{}\t{}\t{}\t{}\t{}\n", t.task_id, t.high_a, t.high_b, t.low_a, t.low_b);
  return out;
}

TallyResult tally_majority(const std::vector<Judgment>& judgments) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> votes;
  for (const auto& j : judgments) {
    auto& v = votes[j.task_id];
    (j.chose_high ? v.first : v.second)++;
  }
  TallyResult out;
  out.tasks = votes.size();
  for (const auto& [id, v] : votes) {
    if (v.first > v.second) {
      ++out.majority_high;
    } else if (v.second > v.first) {
      ++out.majority_low;
    } else {
      ++out.ties;
    }
  }
  return out;
}

}  // namespace ccrm::validate
