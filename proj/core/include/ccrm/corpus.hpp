#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccrm/error.hpp"
#include "ccrm/tsv.hpp"

namespace ccrm::corpus {

class MissingFile : public Error {
 public:
  explicit MissingFile(std::filesystem::path path);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

class ReferentialIntegrityError : public Error {
 public:
  ReferentialIntegrityError(std::string entity, std::string key);
  const std::string& entity() const { return entity_; }
  const std::string& key() const { return key_; }

 private:
  std::string entity_;
  std::string key_;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class EmptyRange : public Error {
 public:
  using Error::Error;
};

using ccrm::ParseError;

// Language-independent concept identifiers (Wikidata item ids, or
// "<lang>:<title>" when an article has no cross-language identity).
using ConceptIds = std::set<std::string>;

struct YearMonth {
  int year = 0;
  int month = 0;

  // Accepts "YYYY-MM" (as in views.tsv) and "YYYYMM".
  static std::optional<YearMonth> parse(std::string_view text);
  std::string str() const;
  YearMonth next() const;
  int days_in_month() const;

  auto operator<=>(const YearMonth&) const = default;
};

// Inclusive month range, written "YYYY-MM:YYYY-MM".
struct MonthRange {
  YearMonth first;
  YearMonth last;

  static MonthRange parse(std::string_view text);  // throws InvariantViolation
  bool contains(YearMonth m) const { return first <= m && m <= last; }
  std::vector<YearMonth> months() const;
  std::string str() const;
};

struct LanguageEdition {
  std::string code;
  std::string name;
  std::uint64_t size_articles = 0;

  auto operator<=>(const LanguageEdition&) const = default;
};

struct Cuisine {
  std::string id;
  std::string name;
  std::vector<std::string> country_codes;  // ISO 3166 alpha-2

  auto operator<=>(const Cuisine&) const = default;
};

struct OwnershipMap {
  std::map<std::string, std::set<std::string>> language_to_own_cuisines;

  // Empty set for languages that own nothing.
  const std::set<std::string>& own(std::string_view language) const;
  bool owns(std::string_view language, std::string_view cuisine) const;
  std::vector<std::string> owners_of(std::string_view cuisine) const;

  bool operator==(const OwnershipMap&) const = default;
};

struct ConceptSet {
  std::string language;
  std::string cuisine;
  ConceptIds concepts;

  bool operator==(const ConceptSet&) const = default;
};

struct ViewRecord {
  std::string language;
  std::string cuisine;
  YearMonth month;
  std::uint64_t views = 0;

  auto operator<=>(const ViewRecord&) const = default;
};

// Symmetric country adjacency (land border or at most 24 miles of water).
class AdjacencyMap {
 public:
  void add(const std::string& a, const std::string& b);  // adds both directions
  bool adjacent(std::string_view a, std::string_view b) const;
  const std::set<std::string>& neighbors(std::string_view country) const;
  using Table = std::map<std::string, std::set<std::string>, std::less<>>;
  const Table& raw() const { return neighbors_; }

  // Undirected pairs (a < b), sorted.
  std::vector<std::pair<std::string, std::string>> pairs() const;

  // Throws InvariantViolation on asymmetry or self-adjacency.
  void validate() const;

  bool operator==(const AdjacencyMap&) const = default;

 private:
  Table neighbors_;
};

struct CorpusSnapshot {
  std::vector<LanguageEdition> languages;
  std::vector<Cuisine> cuisines;
  OwnershipMap ownership;
  std::vector<ConceptSet> concept_sets;
  std::vector<ViewRecord> views;
  AdjacencyMap adjacency;
  std::map<std::string, std::string> metadata;

  // Sorts every list into canonical order. Lookups below require it.
  void canonicalize();

  // Checks every invariant and foreign key; throws on the first violation.
  void validate() const;

  const LanguageEdition* find_language(std::string_view code) const;
  const Cuisine* find_cuisine(std::string_view id) const;
  // nullptr when the article is absent. A present article may have no concepts.
  const ConceptSet* find_article(std::string_view language, std::string_view cuisine) const;
  bool has_article(std::string_view language, std::string_view cuisine) const;

  std::vector<std::string> language_codes() const;
  std::vector<std::string> cuisine_ids() const;

  // Months that carry at least one view record, ascending.
  std::vector<YearMonth> view_months() const;

  bool operator==(const CorpusSnapshot&) const = default;
};

inline constexpr std::string_view kFormatVersion = "1";

CorpusSnapshot load_snapshot(const std::filesystem::path& dir);

// Writes the canonical on-disk form. The snapshot is canonicalized and
// validated first.
void save_snapshot(CorpusSnapshot snapshot, const std::filesystem::path& dir);

// Reads only the static tables (languages, cuisines, ownership, adjacency)
// from a directory. Used to seed ingestion. Cross-table keys are validated.
CorpusSnapshot load_static_tables(const std::filesystem::path& dir);

bool is_valid_language_code(std::string_view code);
bool is_valid_country_code(std::string_view code);

enum class AttentionSource { Views, Outlinks };

std::string_view to_string(AttentionSource source);
std::optional<AttentionSource> parse_attention_source(std::string_view text);

/// f(l, o): attention of language l toward cuisine o.
///
/// Cells for articles that do not exist hold 0 and are flagged in the missing
/// mask; the zero enters row sums, the flag keeps them out of averages.
struct AttentionMatrix {
  std::vector<std::string> languages;
  std::vector<std::string> cuisines;
  std::vector<double> values;      // row-major, languages x cuisines
  std::vector<std::uint8_t> missing;
  AttentionSource source = AttentionSource::Views;

  static AttentionMatrix from_rows(std::vector<std::string> languages, std::vector<std::string> cuisines,
                                   const std::vector<std::vector<double>>& rows);

  std::size_t language_count() const { return languages.size(); }
  std::size_t cuisine_count() const { return cuisines.size(); }
  double at(std::size_t l, std::size_t o) const { return values[l * cuisines.size() + o]; }
  double& at(std::size_t l, std::size_t o) { return values[l * cuisines.size() + o]; }
  bool is_missing(std::size_t l, std::size_t o) const { return missing[l * cuisines.size() + o] != 0; }
  std::optional<std::size_t> language_index(std::string_view code) const;
  std::optional<std::size_t> cuisine_index(std::string_view id) const;
  double row_total(std::size_t l) const;
};

AttentionMatrix attention_matrix(const CorpusSnapshot& snapshot, AttentionSource source,
                                 std::optional<MonthRange> month_range = std::nullopt);

}  // namespace ccrm::corpus
