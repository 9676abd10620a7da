#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ccrm/corpus.hpp"
#include "ccrm/transport.hpp"

namespace ccrm::ingest {

class ArticleNotFound : public Error {
 public:
  using Error::Error;
};

// HTTP 429 persisted past the retry budget.
class RateLimited : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

struct SeedFailure {
  std::string language;
  std::string cuisine;
  std::string reason;
};

// Too many seeds failed. `failures` lists every one of them.
class BuildFailed : public Error {
 public:
  BuildFailed(std::vector<SeedFailure> failures, std::size_t seed_count);
  const std::vector<SeedFailure>& failures() const { return failures_; }

 private:
  std::vector<SeedFailure> failures_;
};

struct SeedEntry {
  std::string language;
  std::string cuisine;
  std::string article_title;
  std::string article_url;

  void validate() const;  // throws InvariantViolation
  auto operator<=>(const SeedEntry&) const = default;
};

// Seed file: TSV with header language, cuisine_id, article_title, article_url.
std::vector<SeedEntry> load_seeds(const std::filesystem::path& path);

struct FetchPolicy {
  int max_concurrent_requests = 4;  // 1..16
  int min_request_interval_ms = 100;
  int retries = 3;
  int backoff_base_ms = 500;
  int timeout_ms = 30000;

  void validate() const;
};

// URL patterns. The wiki pattern is the api.php endpoint with a {lang}
// placeholder. The views pattern takes {lang}, {title}, {start}, {end}.
struct Endpoints {
  std::string wiki_api = "https://{lang}.wikipedia.org/w/api.php";
  std::string views_api =
      "https://wikimedia.org/api/rest_v1/metrics/pageviews/per-article/{lang}.wikipedia/all-access/user/"
      "{title}/monthly/{start}/{end}";

  // Defaults overridden by CCRM_WIKI_API and CCRM_VIEWS_API when set.
  static Endpoints from_env();
};

// Serializes requests to one host and keeps at least `interval` between the
// end of one request and the start of the next.
class HostPacer {
  struct Slot {
    std::mutex mu;
    std::optional<Clock::time_point> last;
  };

 public:
  // Holds the host until destroyed; the release time starts the next interval.
  class Ticket {
   public:
    Ticket(Ticket&&) = default;
    ~Ticket();

   private:
    friend class HostPacer;
    Ticket(Clock& clock, Slot& slot) : clock_(&clock), slot_(&slot), lock_(slot.mu) {}
    Clock* clock_;
    Slot* slot_;
    std::unique_lock<std::mutex> lock_;
  };

  HostPacer(Clock& clock, std::chrono::milliseconds interval) : clock_(clock), interval_(interval) {}
  Ticket acquire(const std::string& host);

 private:
  Clock& clock_;
  std::chrono::milliseconds interval_;
  std::mutex map_mu_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
};

// GET with pacing and retries. Returns 2xx and 404 responses; anything else
// ends in NetworkError or RateLimited.
class Fetcher {
 public:
  Fetcher(Transport& transport, FetchPolicy policy, Clock& clock);
  HttpResponse get(const std::string& url);
  const FetchPolicy& policy() const { return policy_; }

 private:
  Transport& transport_;
  FetchPolicy policy_;
  Clock& clock_;
  HostPacer pacer_;
};

struct OutlinkResult {
  corpus::ConceptSet concepts;
  std::string resolved_title;  // differs from the seed title after a redirect
};

OutlinkResult fetch_outlinks(const SeedEntry& seed, Fetcher& fetcher, const Endpoints& endpoints = {});

// `title` overrides the seed title, e.g. with a resolved redirect target.
std::vector<corpus::ViewRecord> fetch_views(const SeedEntry& seed, const corpus::MonthRange& months, Fetcher& fetcher,
                                            const Endpoints& endpoints = {},
                                            const std::optional<std::string>& title = std::nullopt);

struct BuildOptions {
  std::filesystem::path static_dir;  // languages, cuisines, ownership, adjacency
  double max_failure_fraction = 0.5;
  Endpoints endpoints;
};

corpus::CorpusSnapshot build_snapshot(const std::vector<SeedEntry>& seeds, const corpus::MonthRange& months,
                                      const FetchPolicy& policy, const std::filesystem::path& out,
                                      Transport& transport, Clock& clock, const BuildOptions& options);

// URLs issued by fetch_outlinks and fetch_views, exposed for recording tools.
std::string wiki_url(const Endpoints& endpoints, std::string_view language,
                     const std::vector<std::pair<std::string, std::string>>& params);
std::string views_url(const Endpoints& endpoints, std::string_view language, std::string_view title,
                      const corpus::MonthRange& months);

}  // namespace ccrm::ingest
