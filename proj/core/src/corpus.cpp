#include "ccrm/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <tuple>

#include <fmt/format.h>
#include "json.hpp"

namespace ccrm::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

MissingFile::MissingFile(fs::path path)
    : Error(fmt::format("missing file: {}", path.string())), path_(std::move(path)) {}

ReferentialIntegrityError::ReferentialIntegrityError(std::string entity, std::string key)
    : Error(fmt::format("dangling reference to {} '{}'", entity, key)),
      entity_(std::move(entity)),
      key_(std::move(key)) {}

// ---------------------------------------------------------------------------
// Months

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
  std::string_view ys, ms;
  if (text.size() == 7 && text[4] == '-') {
    ys = text.substr(0, 4);
    ms = text.substr(5, 2);
  } else if (text.size() == 6) {
    ys = text.substr(0, 4);
    ms = text.substr(4, 2);
  } else {
    return std::nullopt;
  }
  auto all_digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(ys) || !all_digits(ms)) return std::nullopt;
  YearMonth ym;
  std::from_chars(ys.data(), ys.data() + ys.size(), ym.year);
  std::from_chars(ms.data(), ms.data() + ms.size(), ym.month);
  if (ym.month < 1 || ym.month > 12 || ym.year < 1) return std::nullopt;
  return ym;
}

std::string YearMonth::str() const { return fmt::format("{:04}-{:02}", year, month); }

YearMonth YearMonth::next() const {
  return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

int YearMonth::days_in_month() const {
  static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : kDays[month - 1];
}

MonthRange MonthRange::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvariantViolation(fmt::format("month range '{}' must be YYYY-MM:YYYY-MM", text));
  }
  auto a = YearMonth::parse(text.substr(0, colon));
  auto b = YearMonth::parse(text.substr(colon + 1));
  if (!a || !b) throw InvariantViolation(fmt::format("month range '{}' has an invalid month", text));
  if (*b < *a) throw InvariantViolation(fmt::format("month range '{}' is reversed", text));
  return {*a, *b};
}

std::vector<YearMonth> MonthRange::months() const {
  std::vector<YearMonth> out;
  for (auto m = first; m <= last; m = m.next()) out.push_back(m);
  return out;
}

std::string MonthRange::str() const { return first.str() + ":" + last.str(); }

// ---------------------------------------------------------------------------
// Ownership and adjacency

const std::set<std::string>& OwnershipMap::own(std::string_view language) const {
  static const std::set<std::string> kEmpty;
  for (const auto& [code, owned] : language_to_own_cuisines)
    if (code == language) return owned;
  return kEmpty;
}

bool OwnershipMap::owns(std::string_view language, std::string_view cuisine) const {
  const auto& owned = own(language);
  return std::any_of(owned.begin(), owned.end(), [&](const auto& c) { return c == cuisine; });
}

std::vector<std::string> OwnershipMap::owners_of(std::string_view cuisine) const {
  std::vector<std::string> out;
  for (const auto& [code, owned] : language_to_own_cuisines)
    if (owned.count(std::string(cuisine))) out.push_back(code);
  return out;
}

void AdjacencyMap::add(const std::string& a, const std::string& b) {
  neighbors_[a].insert(b);
  neighbors_[b].insert(a);
}

bool AdjacencyMap::adjacent(std::string_view a, std::string_view b) const {
  auto it = neighbors_.find(a);
  return it != neighbors_.end() && it->second.count(std::string(b)) > 0;
}

const std::set<std::string>& AdjacencyMap::neighbors(std::string_view country) const {
  static const std::set<std::string> kEmpty;
  auto it = neighbors_.find(country);
  return it == neighbors_.end() ? kEmpty : it->second;
}

std::vector<std::pair<std::string, std::string>> AdjacencyMap::pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [a, ns] : neighbors_)
    for (const auto& b : ns)
      if (a < b) out.emplace_back(a, b);
  return out;
}

void AdjacencyMap::validate() const {
  for (const auto& [a, ns] : neighbors_) {
    for (const auto& b : ns) {
      if (a == b) throw InvariantViolation(fmt::format("country {} is listed as its own neighbor", a));
      if (!adjacent(b, a)) {
        throw InvariantViolation(fmt::format("asymmetric adjacency: {} -> {} without {} -> {}", a, b, b, a));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Validation helpers

bool is_valid_language_code(std::string_view code) {
  auto lower = [](char c) { return c >= 'a' && c <= 'z'; };
  std::size_t i = 0;
  while (i < code.size() && lower(code[i])) ++i;
  if (i < 2 || i > 3) return false;
  if (i == code.size()) return true;
  if (code[i] != '-' || i + 1 == code.size()) return false;
  return std::all_of(code.begin() + static_cast<std::ptrdiff_t>(i) + 1, code.end(), lower);
}

bool is_valid_country_code(std::string_view code) {
  return code.size() == 2 && std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

namespace {

void check_field(std::string_view what, std::string_view value) {
  if (value.find_first_of("\t\n\r") != std::string_view::npos) {
    throw InvariantViolation(fmt::format("{} '{}' contains a tab or line break", what, value));
  }
}

}  // namespace

std::string_view to_string(AttentionSource source) {
  return source == AttentionSource::Views ? "views" : "outlinks";
}

std::optional<AttentionSource> parse_attention_source(std::string_view text) {
  if (text == "views") return AttentionSource::Views;
  if (text == "outlinks") return AttentionSource::Outlinks;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Snapshot

void CorpusSnapshot::canonicalize() {
  std::sort(languages.begin(), languages.end(), [](auto& a, auto& b) { return a.code < b.code; });
  for (auto& c : cuisines) {
    std::sort(c.country_codes.begin(), c.country_codes.end());
    c.country_codes.erase(std::unique(c.country_codes.begin(), c.country_codes.end()), c.country_codes.end());
  }
  std::sort(cuisines.begin(), cuisines.end(), [](auto& a, auto& b) { return a.id < b.id; });
  std::stable_sort(concept_sets.begin(), concept_sets.end(), [](auto& a, auto& b) {
    return std::tie(a.language, a.cuisine) < std::tie(b.language, b.cuisine);
  });
  std::sort(views.begin(), views.end());
}

void CorpusSnapshot::validate() const {
  std::set<std::string> codes;
  for (const auto& l : languages) {
    if (!is_valid_language_code(l.code)) throw InvariantViolation(fmt::format("invalid language code '{}'", l.code));
    if (!codes.insert(l.code).second) throw InvariantViolation(fmt::format("duplicate language code '{}'", l.code));
    check_field("language name", l.name);
  }
  std::set<std::string> ids;
  for (const auto& c : cuisines) {
    if (c.id.empty()) throw InvariantViolation("empty cuisine id");
    check_field("cuisine id", c.id);
    check_field("cuisine name", c.name);
    if (c.id.find(',') != std::string::npos || c.id.find('|') != std::string::npos) {
      throw InvariantViolation(fmt::format("cuisine id '{}' may not contain ',' or '|'", c.id));
    }
    if (!ids.insert(c.id).second) throw InvariantViolation(fmt::format("duplicate cuisine id '{}'", c.id));
    if (c.country_codes.empty()) throw InvariantViolation(fmt::format("cuisine '{}' has no country", c.id));
    for (const auto& cc : c.country_codes)
      if (!is_valid_country_code(cc))
        throw InvariantViolation(fmt::format("cuisine '{}' has invalid country code '{}'", c.id, cc));
  }
  for (const auto& [code, owned] : ownership.language_to_own_cuisines) {
    if (!codes.count(code)) throw ReferentialIntegrityError("language", code);
    if (owned.empty()) throw InvariantViolation(fmt::format("language '{}' has an empty ownership set", code));
    for (const auto& o : owned)
      if (!ids.count(o)) throw ReferentialIntegrityError("cuisine", o);
  }
  std::set<std::pair<std::string, std::string>> articles;
  for (const auto& cs : concept_sets) {
    if (!codes.count(cs.language)) throw ReferentialIntegrityError("language", cs.language);
    if (!ids.count(cs.cuisine)) throw ReferentialIntegrityError("cuisine", cs.cuisine);
    if (!articles.emplace(cs.language, cs.cuisine).second) {
      throw InvariantViolation(fmt::format("duplicate concept set for ({}, {})", cs.language, cs.cuisine));
    }
    for (const auto& c : cs.concepts) {
      if (c.empty()) throw InvariantViolation(fmt::format("empty concept id in ({}, {})", cs.language, cs.cuisine));
      check_field("concept id", c);
    }
  }
  std::set<std::tuple<std::string, std::string, YearMonth>> seen_views;
  for (const auto& v : views) {
    if (!codes.count(v.language)) throw ReferentialIntegrityError("language", v.language);
    if (!ids.count(v.cuisine)) throw ReferentialIntegrityError("cuisine", v.cuisine);
    if (!articles.count({v.language, v.cuisine})) {
      throw ReferentialIntegrityError("article", v.language + "/" + v.cuisine);
    }
    if (v.month.month < 1 || v.month.month > 12 || v.month.year < 1) {
      throw InvariantViolation(fmt::format("invalid month {}", v.month.str()));
    }
    if (!seen_views.emplace(v.language, v.cuisine, v.month).second) {
      throw InvariantViolation(
          fmt::format("duplicate view record ({}, {}, {})", v.language, v.cuisine, v.month.str()));
    }
  }
  adjacency.validate();
  for (const auto& [country, _] : adjacency.raw())
    if (!is_valid_country_code(country))
      throw InvariantViolation(fmt::format("invalid country code '{}' in adjacency", country));
}

const LanguageEdition* CorpusSnapshot::find_language(std::string_view code) const {
  auto it = std::lower_bound(languages.begin(), languages.end(), code,
                             [](const LanguageEdition& l, std::string_view c) { return l.code < c; });
  return it != languages.end() && it->code == code ? &*it : nullptr;
}

const Cuisine* CorpusSnapshot::find_cuisine(std::string_view id) const {
  auto it = std::lower_bound(cuisines.begin(), cuisines.end(), id,
                             [](const Cuisine& c, std::string_view i) { return c.id < i; });
  return it != cuisines.end() && it->id == id ? &*it : nullptr;
}

const ConceptSet* CorpusSnapshot::find_article(std::string_view language, std::string_view cuisine) const {
  auto key = std::pair{language, cuisine};
  auto it = std::lower_bound(concept_sets.begin(), concept_sets.end(), key, [](const ConceptSet& cs, auto k) {
    return std::pair<std::string_view, std::string_view>{cs.language, cs.cuisine} < k;
  });
  return it != concept_sets.end() && it->language == language && it->cuisine == cuisine ? &*it : nullptr;
}

bool CorpusSnapshot::has_article(std::string_view language, std::string_view cuisine) const {
  return find_article(language, cuisine) != nullptr;
}

std::vector<std::string> CorpusSnapshot::language_codes() const {
  std::vector<std::string> out;
  for (const auto& l : languages) out.push_back(l.code);
  return out;
}

std::vector<std::string> CorpusSnapshot::cuisine_ids() const {
  std::vector<std::string> out;
  for (const auto& c : cuisines) out.push_back(c.id);
  return out;
}

std::vector<YearMonth> CorpusSnapshot::view_months() const {
  std::set<YearMonth> months;
  for (const auto& v : views) months.insert(v.month);
  return {months.begin(), months.end()};
}

// ---------------------------------------------------------------------------
// On-disk format

namespace {

constexpr std::string_view kManifest = "manifest.json";
constexpr std::string_view kLanguages = "languages.tsv";
constexpr std::string_view kCuisines = "cuisines.tsv";
constexpr std::string_view kOwnership = "ownership.tsv";
constexpr std::string_view kConcepts = "concepts.tsv";
constexpr std::string_view kViews = "views.tsv";
constexpr std::string_view kAdjacency = "adjacency.tsv";

constexpr std::array<std::string_view, 3> kLanguageHeader{"code", "name", "size_articles"};
constexpr std::array<std::string_view, 3> kCuisineHeader{"id", "name", "country_codes"};
constexpr std::array<std::string_view, 2> kOwnershipHeader{"language_code", "cuisine_id"};
constexpr std::array<std::string_view, 3> kConceptHeader{"language_code", "cuisine_id", "concept_id"};
constexpr std::array<std::string_view, 4> kViewHeader{"language_code", "cuisine_id", "month", "views"};
constexpr std::array<std::string_view, 2> kAdjacencyHeader{"country_a", "country_b"};

tsv::Table read_table(const fs::path& dir, std::string_view name, std::span<const std::string_view> header) {
  const auto path = dir / name;
  if (!fs::is_regular_file(path)) throw MissingFile(path);
  return tsv::parse(tsv::read_file(path), header, std::string(name));
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::vector<LanguageEdition> parse_languages(const tsv::Table& t) {
  std::vector<LanguageEdition> out;
  for (const auto& row : t.rows) {
    out.push_back({row.fields[0], row.fields[1], tsv::parse_unsigned(row, 2, t.source)});
  }
  return out;
}

std::vector<Cuisine> parse_cuisines(const tsv::Table& t) {
  std::vector<Cuisine> out;
  for (const auto& row : t.rows) {
    Cuisine c{row.fields[0], row.fields[1], {}};
    if (!row.fields[2].empty()) c.country_codes = tsv::split(row.fields[2], ',');
    out.push_back(std::move(c));
  }
  return out;
}

OwnershipMap parse_ownership(const tsv::Table& t) {
  OwnershipMap out;
  for (const auto& row : t.rows) {
    if (!out.language_to_own_cuisines[row.fields[0]].insert(row.fields[1]).second) {
      throw ParseError(t.source, row.line, 1, "duplicate ownership row");
    }
  }
  return out;
}

AdjacencyMap parse_adjacency(const tsv::Table& t) {
  // Rows are undirected pairs written once with a < b. A row with a > b is read
  // as a directed claim and must be backed by the canonical row for the pair.
  std::set<std::pair<std::string, std::string>> undirected;
  std::vector<std::pair<std::string, std::string>> directed;
  for (const auto& row : t.rows) {
    const auto& a = row.fields[0];
    const auto& b = row.fields[1];
    if (!is_valid_country_code(a)) throw ParseError(t.source, row.line, 1, fmt::format("invalid country '{}'", a));
    if (!is_valid_country_code(b)) throw ParseError(t.source, row.line, 2, fmt::format("invalid country '{}'", b));
    if (a == b) throw InvariantViolation(fmt::format("country {} is listed as its own neighbor", a));
    if (a < b) {
      undirected.emplace(a, b);
    } else {
      directed.emplace_back(a, b);
    }
  }
  for (const auto& [a, b] : directed) {
    if (!undirected.count({b, a})) {
      throw InvariantViolation(fmt::format("asymmetric adjacency: {} -> {} without {} -> {}", a, b, b, a));
    }
  }
  AdjacencyMap adj;
  for (const auto& [a, b] : undirected) adj.add(a, b);
  return adj;
}

std::string render_table(std::span<const std::string_view> header, const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out.push_back('\t');
    out += header[i];
  }
  out.push_back('\n');
  for (const auto& r : rows) {
    out += tsv::join(r);
    out.push_back('\n');
  }
  return out;
}

}  // namespace

CorpusSnapshot load_static_tables(const fs::path& dir) {
  CorpusSnapshot snap;
  snap.languages = parse_languages(read_table(dir, kLanguages, kLanguageHeader));
  snap.cuisines = parse_cuisines(read_table(dir, kCuisines, kCuisineHeader));
  snap.ownership = parse_ownership(read_table(dir, kOwnership, kOwnershipHeader));
  snap.adjacency = parse_adjacency(read_table(dir, kAdjacency, kAdjacencyHeader));
  snap.canonicalize();
  snap.validate();
  return snap;
}

CorpusSnapshot load_snapshot(const fs::path& dir) {
  const auto manifest_path = dir / kManifest;
  if (!fs::is_regular_file(manifest_path)) throw MissingFile(manifest_path);
  const auto manifest_text = tsv::read_file(manifest_path);
  json manifest;
  try {
    manifest = json::parse(manifest_text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(manifest_text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string(kManifest), line, col, e.what());
  }
  if (!manifest.is_object() || !manifest.contains("format_version") ||
      manifest["format_version"] != std::string(kFormatVersion)) {
    throw InvariantViolation(fmt::format("{}: format_version must be \"{}\"", kManifest, kFormatVersion));
  }

  CorpusSnapshot snap;
  snap.languages = parse_languages(read_table(dir, kLanguages, kLanguageHeader));
  snap.cuisines = parse_cuisines(read_table(dir, kCuisines, kCuisineHeader));
  snap.ownership = parse_ownership(read_table(dir, kOwnership, kOwnershipHeader));
  snap.adjacency = parse_adjacency(read_table(dir, kAdjacency, kAdjacencyHeader));

  std::map<std::pair<std::string, std::string>, ConceptIds> articles;
  {
    const auto t = read_table(dir, kConcepts, kConceptHeader);
    for (const auto& row : t.rows) {
      if (row.fields[2].empty()) throw ParseError(t.source, row.line, 3, "empty concept id");
      if (!articles[{row.fields[0], row.fields[1]}].insert(row.fields[2]).second) {
        throw ParseError(t.source, row.line, 3, "duplicate concept row");
      }
    }
  }
  try {
    if (manifest.contains("empty_articles")) {
      for (const auto& entry : manifest.at("empty_articles")) {
        std::pair<std::string, std::string> key{entry.at(0).get<std::string>(), entry.at(1).get<std::string>()};
        if (articles.count(key)) {
          throw InvariantViolation(
              fmt::format("article ({}, {}) is listed as empty but has concepts", key.first, key.second));
        }
        articles[key];
      }
    }
    if (manifest.contains("metadata")) {
      for (const auto& [k, v] : manifest.at("metadata").items()) snap.metadata[k] = v.get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string(kManifest), 1, 1, e.what());
  }
  for (auto& [key, concepts] : articles) snap.concept_sets.push_back({key.first, key.second, std::move(concepts)});

  {
    const auto t = read_table(dir, kViews, kViewHeader);
    for (const auto& row : t.rows) {
      auto month = YearMonth::parse(row.fields[2]);
      if (!month || row.fields[2].size() != 7) {
        throw ParseError(t.source, row.line, 3, fmt::format("invalid month '{}'", row.fields[2]));
      }
      snap.views.push_back({row.fields[0], row.fields[1], *month, tsv::parse_unsigned(row, 3, t.source)});
    }
  }

  snap.canonicalize();
  snap.validate();
  return snap;
}

void save_snapshot(CorpusSnapshot snapshot, const fs::path& dir) {
  snapshot.canonicalize();
  snapshot.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IOError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));

  std::vector<std::vector<std::string>> rows;
  for (const auto& l : snapshot.languages) rows.push_back({l.code, l.name, std::to_string(l.size_articles)});
  tsv::write_file(dir / kLanguages, render_table(kLanguageHeader, rows));

  rows.clear();
  for (const auto& c : snapshot.cuisines) rows.push_back({c.id, c.name, tsv::join(c.country_codes, ',')});
  tsv::write_file(dir / kCuisines, render_table(kCuisineHeader, rows));

  rows.clear();
  for (const auto& [code, owned] : snapshot.ownership.language_to_own_cuisines)
    for (const auto& o : owned) rows.push_back({code, o});
  tsv::write_file(dir / kOwnership, render_table(kOwnershipHeader, rows));

  rows.clear();
  json empty_articles = json::array();
  for (const auto& cs : snapshot.concept_sets) {
    if (cs.concepts.empty()) empty_articles.push_back({cs.language, cs.cuisine});
    for (const auto& c : cs.concepts) rows.push_back({cs.language, cs.cuisine, c});
  }
  tsv::write_file(dir / kConcepts, render_table(kConceptHeader, rows));

  rows.clear();
  for (const auto& v : snapshot.views)
    rows.push_back({v.language, v.cuisine, v.month.str(), std::to_string(v.views)});
  tsv::write_file(dir / kViews, render_table(kViewHeader, rows));

  rows.clear();
  for (const auto& [a, b] : snapshot.adjacency.pairs()) rows.push_back({a, b});
  tsv::write_file(dir / kAdjacency, render_table(kAdjacencyHeader, rows));

  json manifest;
  manifest["format_version"] = std::string(kFormatVersion);
  manifest["files"] = {kAdjacency, kConcepts, kCuisines, kLanguages, kOwnership, kViews};
  manifest["metadata"] = snapshot.metadata;
  manifest["empty_articles"] = empty_articles;
  tsv::write_file(dir / kManifest, manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Attention

AttentionMatrix AttentionMatrix::from_rows(std::vector<std::string> languages, std::vector<std::string> cuisines,
                                           const std::vector<std::vector<double>>& rows) {
  AttentionMatrix m;
  m.languages = std::move(languages);
  m.cuisines = std::move(cuisines);
  if (rows.size() != m.languages.size()) throw InvariantViolation("attention rows do not match languages");
  for (const auto& r : rows) {
    if (r.size() != m.cuisines.size()) throw InvariantViolation("attention row does not match cuisines");
    for (double v : r) {
      if (!(v >= 0)) throw InvariantViolation("attention values must be nonnegative");
      m.values.push_back(v);
    }
  }
  m.missing.assign(m.values.size(), 0);
  return m;
}

std::optional<std::size_t> AttentionMatrix::language_index(std::string_view code) const {
  auto it = std::find(languages.begin(), languages.end(), code);
  if (it == languages.end()) return std::nullopt;
  return static_cast<std::size_t>(it - languages.begin());
}

std::optional<std::size_t> AttentionMatrix::cuisine_index(std::string_view id) const {
  auto it = std::find(cuisines.begin(), cuisines.end(), id);
  if (it == cuisines.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cuisines.begin());
}

double AttentionMatrix::row_total(std::size_t l) const {
  double total = 0;
  for (std::size_t o = 0; o < cuisines.size(); ++o) total += at(l, o);
  return total;
}

AttentionMatrix attention_matrix(const CorpusSnapshot& snapshot, AttentionSource source,
                                 std::optional<MonthRange> month_range) {
  AttentionMatrix m;
  m.source = source;
  m.languages = snapshot.language_codes();
  m.cuisines = snapshot.cuisine_ids();
  const auto n_l = m.languages.size();
  const auto n_o = m.cuisines.size();
  m.values.assign(n_l * n_o, 0.0);
  m.missing.assign(n_l * n_o, 1);

  for (std::size_t l = 0; l < n_l; ++l) {
    for (std::size_t o = 0; o < n_o; ++o) {
      if (const auto* cs = snapshot.find_article(m.languages[l], m.cuisines[o])) {
        m.missing[l * n_o + o] = 0;
        if (source == AttentionSource::Outlinks) m.values[l * n_o + o] = static_cast<double>(cs->concepts.size());
      }
    }
  }

  if (source == AttentionSource::Views) {
    bool selected = false;
    for (const auto& v : snapshot.views) {
      const auto l = m.language_index(v.language);
      const auto o = m.cuisine_index(v.cuisine);
      if (!l || !o) continue;
      if (month_range && !month_range->contains(v.month)) continue;
      selected = true;
      m.values[*l * n_o + *o] += static_cast<double>(v.views);
    }
    if (month_range && !selected) {
      throw EmptyRange(fmt::format("month range {} selects no view records", month_range->str()));
    }
  }
  return m;
}

}  // namespace ccrm::corpus
