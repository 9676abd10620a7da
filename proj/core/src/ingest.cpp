#include "ccrm/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

namespace ccrm::ingest {

namespace fs = std::filesystem;
using corpus::InvariantViolation;
using corpus::MonthRange;
using corpus::YearMonth;
using nlohmann::json;

namespace {

std::string describe_failures(const std::vector<SeedFailure>& failures, std::size_t seed_count) {
  std::string out = fmt::format("{} of {} seeds failed", failures.size(), seed_count);
  for (const auto& f : failures) out += fmt::format("\n  {}/{}: {}", f.language, f.cuisine, f.reason);
  return out;
}

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

}  // namespace

BuildFailed::BuildFailed(std::vector<SeedFailure> failures, std::size_t seed_count)
    : Error(describe_failures(failures, seed_count)), failures_(std::move(failures)) {}

void SeedEntry::validate() const {
  if (!corpus::is_valid_language_code(language)) {
    throw InvariantViolation(fmt::format("seed has invalid language code '{}'", language));
  }
  if (cuisine.empty()) throw InvariantViolation("seed has an empty cuisine id");
  if (article_title.empty()) {
    throw InvariantViolation(fmt::format("seed {}/{} has an empty article title", language, cuisine));
  }
  if (url_host(article_url).empty()) {
    throw InvariantViolation(fmt::format("seed {}/{} has a malformed URL '{}'", language, cuisine, article_url));
  }
}

std::vector<SeedEntry> load_seeds(const fs::path& path) {
  if (!fs::exists(path)) throw corpus::MissingFile(path);
  static constexpr std::string_view kHeader[] = {"language", "cuisine_id", "article_title", "article_url"};
  const auto table = tsv::parse(tsv::read_file(path), kHeader, path.filename().string());
  std::vector<SeedEntry> seeds;
  for (const auto& row : table.rows) {
    SeedEntry s{row.fields[0], row.fields[1], row.fields[2], row.fields[3]};
    try {
      s.validate();
    } catch (const InvariantViolation& e) {
      throw ParseError(table.source, row.line, 1, e.what());
    }
    seeds.push_back(std::move(s));
  }
  return seeds;
}

void FetchPolicy::validate() const {
  if (max_concurrent_requests < 1 || max_concurrent_requests > 16) {
    throw InvariantViolation(fmt::format("max_concurrent_requests must be in [1, 16], got {}", max_concurrent_requests));
  }
  if (min_request_interval_ms < 0 || min_request_interval_ms > 600000) {
    throw InvariantViolation(fmt::format("min_request_interval_ms must be in [0, 600000], got {}", min_request_interval_ms));
  }
  if (retries < 0 || retries > 20) throw InvariantViolation(fmt::format("retries must be in [0, 20], got {}", retries));
  if (backoff_base_ms < 1 || backoff_base_ms > 600000) {
    throw InvariantViolation(fmt::format("backoff_base_ms must be in [1, 600000], got {}", backoff_base_ms));
  }
  if (timeout_ms < 1 || timeout_ms > 3600000) {
    throw InvariantViolation(fmt::format("timeout_ms must be in [1, 3600000], got {}", timeout_ms));
  }
}

Endpoints Endpoints::from_env() {
  Endpoints e;
  if (const char* v = std::getenv("CCRM_WIKI_API"); v && *v) e.wiki_api = v;
  if (const char* v = std::getenv("CCRM_VIEWS_API"); v && *v) e.views_api = v;
  return e;
}

// ---------------------------------------------------------------------------

HostPacer::Ticket::~Ticket() {
  if (lock_.owns_lock()) slot_->last = clock_->now();
}

HostPacer::Ticket HostPacer::acquire(const std::string& host) {
  Slot* slot;
  {
    std::lock_guard lock(map_mu_);
    auto& p = slots_[host];
    if (!p) p = std::make_unique<Slot>();
    slot = p.get();
  }
  Ticket ticket(clock_, *slot);
  if (slot->last) {
    const auto ready = *slot->last + interval_;
    const auto now = clock_.now();
    if (now < ready) clock_.sleep_for(std::chrono::ceil<std::chrono::milliseconds>(ready - now));
  }
  return ticket;
}

Fetcher::Fetcher(Transport& transport, FetchPolicy policy, Clock& clock)
    : transport_(transport),
      policy_((policy.validate(), policy)),
      clock_(clock),
      pacer_(clock, std::chrono::milliseconds(policy.min_request_interval_ms)) {}

HttpResponse Fetcher::get(const std::string& url) {
  const auto host = url_host(url);
  const auto backoff = [&](int attempt) {
    return std::chrono::milliseconds(static_cast<long long>(policy_.backoff_base_ms) << std::min(attempt, 20));
  };
  for (int attempt = 0;; ++attempt) {
    const bool last = attempt >= policy_.retries;
    HttpResponse response;
    try {
      const auto ticket = pacer_.acquire(host);
      response = transport_.get(url);
    } catch (const TransportError& e) {
      if (last) throw NetworkError(fmt::format("{} (after {} retries)", e.what(), attempt));
      spdlog::debug("retrying {}: {}", url, e.what());
      clock_.sleep_for(backoff(attempt));
      continue;
    }
    const int status = response.status;
    if ((status >= 200 && status < 300) || status == 404) return response;
    if (status == 429) {
      if (last) throw RateLimited(fmt::format("GET {}: rate limited (after {} retries)", url, attempt));
      auto wait = backoff(attempt);
      if (auto it = response.headers.find("retry-after"); it != response.headers.end()) {
        char* end = nullptr;
        const long seconds = std::strtol(it->second.c_str(), &end, 10);
        if (end != it->second.c_str() && *end == '\0' && seconds >= 0) wait = std::chrono::seconds(seconds);
      }
      spdlog::debug("rate limited on {}; waiting {} ms", url, wait.count());
      clock_.sleep_for(wait);
      continue;
    }
    if (status >= 500) {
      if (last) throw NetworkError(fmt::format("GET {}: HTTP {} (after {} retries)", url, status, attempt));
      clock_.sleep_for(backoff(attempt));
      continue;
    }
    throw NetworkError(fmt::format("GET {}: HTTP {}", url, status));
  }
}

// ---------------------------------------------------------------------------

std::string wiki_url(const Endpoints& endpoints, std::string_view language,
                     const std::vector<std::pair<std::string, std::string>>& params) {
  auto url = replace_all(endpoints.wiki_api, "{lang}", language);
  char sep = url.find('?') == std::string::npos ? '?' : '&';
  for (const auto& [k, v] : params) {
    url += sep;
    url += percent_encode(k) + "=" + percent_encode(v);
    sep = '&';
  }
  return url;
}

std::string views_url(const Endpoints& endpoints, std::string_view language, std::string_view title,
                      const MonthRange& months) {
  std::string underscored(title);
  std::replace(underscored.begin(), underscored.end(), ' ', '_');
  const auto start = fmt::format("{:04}{:02}01", months.first.year, months.first.month);
  const auto end = fmt::format("{:04}{:02}{:02}", months.last.year, months.last.month, months.last.days_in_month());
  auto url = replace_all(endpoints.views_api, "{lang}", language);
  url = replace_all(url, "{title}", percent_encode(underscored));
  url = replace_all(url, "{start}", start);
  return replace_all(url, "{end}", end);
}

namespace {

json parse_body(const HttpResponse& response, const std::string& what) {
  try {
    return json::parse(response.body);
  } catch (const json::parse_error& e) {
    throw NetworkError(fmt::format("malformed payload for {}: {}", what, e.what()));
  }
}

// API-level error objects ("error": {"code": ...}) come back with status 200.
void check_api_error(const json& body, const std::string& what) {
  if (body.is_object() && body.contains("error")) {
    const auto& err = body["error"];
    const auto code = err.is_object() ? err.value("code", std::string("unknown")) : std::string("unknown");
    throw NetworkError(fmt::format("API error for {}: {}", what, code));
  }
}

const json& pages_of(const json& body) {
  static const json kEmpty = json::array();
  if (!body.contains("query") || !body["query"].contains("pages")) return kEmpty;
  return body["query"]["pages"];
}

}  // namespace

OutlinkResult fetch_outlinks(const SeedEntry& seed, Fetcher& fetcher, const Endpoints& endpoints) {
  const auto what = fmt::format("{}/{} '{}'", seed.language, seed.cuisine, seed.article_title);

  // Resolve the title first. A redirect is followed once.
  const auto info_url = wiki_url(endpoints, seed.language,
                                 {{"action", "query"},
                                  {"format", "json"},
                                  {"formatversion", "2"},
                                  {"redirects", "1"},
                                  {"titles", seed.article_title}});
  const auto info_response = fetcher.get(info_url);
  if (info_response.status == 404) throw ArticleNotFound(fmt::format("{}: HTTP 404", what));
  const auto info = parse_body(info_response, what);
  check_api_error(info, what);
  const auto& info_pages = pages_of(info);
  if (!info_pages.is_array() || info_pages.empty()) throw NetworkError(fmt::format("no page info for {}", what));
  const auto& page = info_pages.front();
  if (page.value("missing", false) || page.value("invalid", false)) {
    throw ArticleNotFound(fmt::format("{}: no such article", what));
  }
  std::string resolved = page.value("title", seed.article_title);
  if (resolved != seed.article_title) spdlog::info("{} redirects to '{}'", what, resolved);

  OutlinkResult result;
  result.concepts.language = seed.language;
  result.concepts.cuisine = seed.cuisine;
  result.resolved_title = resolved;

  std::vector<std::pair<std::string, std::string>> continuation;
  for (int batch = 0;; ++batch) {
    if (batch > 10000) throw NetworkError(fmt::format("link continuation for {} does not terminate", what));
    std::vector<std::pair<std::string, std::string>> params{{"action", "query"},
                                                            {"format", "json"},
                                                            {"formatversion", "2"},
                                                            {"generator", "links"},
                                                            {"titles", resolved},
                                                            {"gplnamespace", "0"},
                                                            {"gpllimit", "max"},
                                                            {"prop", "pageprops"},
                                                            {"ppprop", "wikibase_item"},
                                                            {"redirects", "1"}};
    params.insert(params.end(), continuation.begin(), continuation.end());
    const auto response = fetcher.get(wiki_url(endpoints, seed.language, params));
    if (response.status == 404) throw ArticleNotFound(fmt::format("{}: HTTP 404 on links", what));
    const auto body = parse_body(response, what);
    check_api_error(body, what);
    const auto& pages = pages_of(body);
    if (!pages.is_array() && !pages.is_object()) throw NetworkError(fmt::format("malformed pages for {}", what));
    for (const auto& p : pages) {
      if (!p.is_object()) throw NetworkError(fmt::format("malformed page entry for {}", what));
      if (p.value("missing", false) || p.value("invalid", false)) continue;  // red link
      if (p.value("ns", 0) != 0) continue;
      const auto title = p.value("title", std::string{});
      if (title.empty()) continue;
      std::string id;
      if (p.contains("pageprops") && p["pageprops"].contains("wikibase_item")) {
        id = p["pageprops"]["wikibase_item"].get<std::string>();
      }
      result.concepts.concepts.insert(id.empty() ? seed.language + ":" + title : id);
    }
    if (!body.contains("continue") || !body["continue"].is_object()) break;
    continuation.clear();
    for (const auto& [k, v] : body["continue"].items()) {
      continuation.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
  return result;
}

std::vector<corpus::ViewRecord> fetch_views(const SeedEntry& seed, const MonthRange& months, Fetcher& fetcher,
                                            const Endpoints& endpoints, const std::optional<std::string>& title) {
  if (months.last < months.first) throw corpus::EmptyRange(fmt::format("empty month range {}", months.str()));
  const auto& article = title ? *title : seed.article_title;
  const auto what = fmt::format("{}/{} '{}'", seed.language, seed.cuisine, article);
  const auto response = fetcher.get(views_url(endpoints, seed.language, article, months));

  std::map<YearMonth, std::uint64_t> by_month;
  if (response.status != 404) {
    const auto body = parse_body(response, what);
    try {
      for (const auto& item : body.at("items")) {
        const auto stamp = item.at("timestamp").get<std::string>();
        const auto month = YearMonth::parse(std::string_view(stamp).substr(0, 6));
        if (!month) throw NetworkError(fmt::format("bad timestamp '{}' in views for {}", stamp, what));
        if (!months.contains(*month)) continue;
        by_month[*month] += item.at("views").get<std::uint64_t>();
      }
    } catch (const json::exception& e) {
      throw NetworkError(fmt::format("malformed views payload for {}: {}", what, e.what()));
    }
  }

  std::vector<corpus::ViewRecord> out;
  std::vector<std::string> gaps;
  for (const auto& m : months.months()) {
    auto it = by_month.find(m);
    if (it == by_month.end()) {
      gaps.push_back(m.str());
      continue;
    }
    out.push_back({seed.language, seed.cuisine, m, it->second});
  }
  if (!gaps.empty()) spdlog::info("no view data for {} in {} month(s): {}", what, gaps.size(), fmt::join(gaps, ", "));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct SeedOutcome {
  std::optional<OutlinkResult> outlinks;
  std::vector<corpus::ViewRecord> views;
  std::string failure;
};

}  // namespace

corpus::CorpusSnapshot build_snapshot(const std::vector<SeedEntry>& seeds, const MonthRange& months,
                                      const FetchPolicy& policy, const fs::path& out, Transport& transport,
                                      Clock& clock, const BuildOptions& options) {
  if (seeds.empty()) throw Error("build_snapshot: no seeds");
  if (!(options.max_failure_fraction >= 0 && options.max_failure_fraction <= 1)) {
    throw Error("build_snapshot: failure threshold must be in [0, 1]");
  }
  policy.validate();
  auto snapshot = corpus::load_static_tables(options.static_dir);
  snapshot.canonicalize();

  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& s : seeds) {
    s.validate();
    if (!snapshot.find_language(s.language)) throw corpus::ReferentialIntegrityError("language", s.language);
    if (!snapshot.find_cuisine(s.cuisine)) throw corpus::ReferentialIntegrityError("cuisine", s.cuisine);
    if (!keys.emplace(s.language, s.cuisine).second) {
      throw InvariantViolation(fmt::format("duplicate seed for {}/{}", s.language, s.cuisine));
    }
  }

  Fetcher fetcher(transport, policy, clock);
  std::vector<SeedOutcome> outcomes(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (auto i = next++; i < seeds.size(); i = next++) {
      auto& o = outcomes[i];
      try {
        o.outlinks = fetch_outlinks(seeds[i], fetcher, options.endpoints);
        o.views = fetch_views(seeds[i], months, fetcher, options.endpoints, o.outlinks->resolved_title);
      } catch (const Error& e) {
        o.outlinks.reset();
        o.views.clear();
        o.failure = e.what();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(policy.max_concurrent_requests), seeds.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<SeedFailure> failures;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& s = seeds[i];
    auto& o = outcomes[i];
    if (!o.outlinks) {
      spdlog::warn("seed {}/{} failed: {}", s.language, s.cuisine, o.failure);
      failures.push_back({s.language, s.cuisine, o.failure});
      snapshot.metadata[fmt::format("failure:{}:{}", s.language, s.cuisine)] = o.failure;
      continue;
    }
    if (o.outlinks->resolved_title != s.article_title) {
      snapshot.metadata[fmt::format("resolved_title:{}:{}", s.language, s.cuisine)] = o.outlinks->resolved_title;
    }
    snapshot.concept_sets.push_back(std::move(o.outlinks->concepts));
    snapshot.views.insert(snapshot.views.end(), o.views.begin(), o.views.end());
  }
  std::sort(failures.begin(), failures.end(), [](const auto& a, const auto& b) {
    return std::tie(a.language, a.cuisine) < std::tie(b.language, b.cuisine);
  });
  const double fraction = static_cast<double>(failures.size()) / static_cast<double>(seeds.size());
  if (fraction > options.max_failure_fraction) throw BuildFailed(std::move(failures), seeds.size());

  snapshot.metadata["months"] = months.str();
  snapshot.metadata["seed_count"] = std::to_string(seeds.size());
  snapshot.metadata["failed_seed_count"] = std::to_string(failures.size());
  corpus::save_snapshot(std::move(snapshot), out);
  return corpus::load_snapshot(out);
}

}  // namespace ccrm::ingest
