#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccrm/corpus.hpp"
#include "ccrm/ingest.hpp"
#include "ccrm/measures.hpp"
#include "ccrm/sim.hpp"
#include "ccrm/stats.hpp"

namespace ccrm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataFailure = 2;

struct IngestOptions {
  std::filesystem::path seeds;
  std::string months;
  std::filesystem::path static_dir;
  std::filesystem::path out;
  std::optional<std::filesystem::path> replay;
  std::optional<std::filesystem::path> record;
  ingest::FetchPolicy policy;
  double max_failure_fraction = 0.5;
};

struct AnalyzeOptions {
  std::filesystem::path snapshot;
  std::filesystem::path out;
  corpus::AttentionSource source = corpus::AttentionSource::Views;
  std::optional<std::string> months;
  measures::Thresholds thresholds;
  std::size_t permutations = 10000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct SimulateOptions {
  std::optional<std::filesystem::path> empirical;  // bias matrix TSV
  std::optional<std::filesystem::path> snapshot;   // drops own-cuisine cells from the empirical sample
  bool synthetic = false;
  double synthetic_sigma = 30;
  int synthetic_worlds = 20;
  sim::SimConfig sim;
  std::vector<double> lambda_grid = sim::default_lambda_grid();
  std::vector<double> sigma_grid = sim::default_sigma_grid();
  stats::HistogramSpec histogram;
  std::filesystem::path out;
  unsigned jobs = 1;
};

struct ValidateOptions {
  std::filesystem::path measures;  // analyze output directory
  std::filesystem::path snapshot;
  std::vector<std::filesystem::path> externals;
  std::optional<int> crowd_tasks;
  std::optional<std::filesystem::path> crowd_ranking;
  std::optional<std::filesystem::path> judgments;
  corpus::AttentionSource source = corpus::AttentionSource::Views;
  std::filesystem::path out;
  std::size_t permutations = 10000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

// Each returns an exit code and reports problems on `err`.
int cmd_ingest(const IngestOptions& options, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);

/// Settings for `ccrm all`, read from `key = value` lines. Blank lines and
/// lines starting with '#' are ignored. Keys:
///
///   snapshot, out, source, months, min_cuisines, min_neighbors, seed, jobs,
///   seeds, static, replay, max_failure_fraction,
///   communities, replications, synthetic, synthetic_sigma,
///   external (comma-separated), crowd_tasks, permutations
struct RunConfig {
  std::filesystem::path snapshot;
  std::filesystem::path output_dir;
  corpus::AttentionSource source = corpus::AttentionSource::Views;
  std::optional<std::string> months;
  measures::Thresholds thresholds;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::optional<std::filesystem::path> seeds;
  std::optional<std::filesystem::path> static_dir;
  std::optional<std::filesystem::path> replay;
  double max_failure_fraction = 0.5;
  sim::SimConfig sim;
  bool synthetic = false;
  double synthetic_sigma = 30;
  std::vector<std::filesystem::path> externals;
  std::optional<int> crowd_tasks;
  std::size_t permutations = 10000;

  void validate() const;
};

// Relative paths are resolved against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir,
                           const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

int cmd_all(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command line, argv[0] included.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccrm::cli
