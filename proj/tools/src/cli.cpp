#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "ccrm/report.hpp"
#include "ccrm/tsv.hpp"
#include "ccrm/validate.hpp"
#include "json.hpp"

namespace ccrm::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_cell(const std::optional<double>& v) { return v ? tsv::format_double(*v) : std::string(); }

void write_json(const fs::path& path, const ordered_json& j) { tsv::write_file(path, j.dump(2) + "\n"); }

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return stats::mean(v);
}

ordered_json comparison_json(const validate::Comparison& c) {
  ordered_json j{{"a", c.a}, {"b", c.b}, {"keys_a", c.keys_a}, {"keys_b", c.keys_b}, {"common", c.common}};
  if (c.result) {
    j["rho"] = c.result->rho;
    j["p_value"] = c.result->p_value;
  } else {
    j["error"] = c.error;
  }
  return j;
}

std::string sweep_tsv(const std::vector<sim::SweepRow>& rows) {
  std::string out = "param\tmean_jsd\tstd_jsd\tn_ok\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{}\t{}\n", tsv::format_double(r.param), optional_cell(r.mean_jsd),
                       r.mean_jsd ? tsv::format_double(r.std_jsd) : std::string(), r.n_ok);
  }
  return out;
}

ordered_json best_json(const std::optional<sim::SweepRow>& row) {
  if (!row) return nullptr;
  return ordered_json{{"param", row->param}, {"mean_jsd", *row->mean_jsd}, {"std_jsd", row->std_jsd}};
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  for (const auto& field : tsv::split(text, ',')) {
    double v = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end) throw Error(fmt::format("bad grid value '{}' in '{}'", field, text));
    out.push_back(v);
  }
  if (out.empty()) throw Error("empty grid");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_ingest(const IngestOptions& options, std::ostream& out, std::ostream& err) {
  const auto seeds = ingest::load_seeds(options.seeds);
  const auto months = corpus::MonthRange::parse(options.months);
  ingest::BuildOptions build;
  build.static_dir = options.static_dir;
  build.max_failure_fraction = options.max_failure_fraction;
  build.endpoints = ingest::Endpoints::from_env();

  std::unique_ptr<ingest::Transport> base;
  std::unique_ptr<ingest::Transport> recorder;
  std::unique_ptr<ingest::Clock> clock;
  if (options.replay) {
    base = std::make_unique<ingest::ReplayTransport>(ingest::ReplayTransport::from_directory(*options.replay));
    clock = std::make_unique<ingest::ManualClock>();  // nothing to be polite to
  } else {
    base = std::make_unique<ingest::HttpTransport>(options.policy.timeout_ms);
    clock = std::make_unique<ingest::SystemClock>();
  }
  ingest::Transport* transport = base.get();
  if (options.record) {
    recorder = std::make_unique<ingest::RecordingTransport>(*base, *options.record);
    transport = recorder.get();
  }
  try {
    const auto snapshot =
        ingest::build_snapshot(seeds, months, options.policy, options.out, *transport, *clock, build);
    out << fmt::format("wrote snapshot {}: {} languages, {} cuisines, {} articles, {} view records\n",
                       options.out.string(), snapshot.languages.size(), snapshot.cuisines.size(),
                       snapshot.concept_sets.size(), snapshot.views.size());
    return kExitOk;
  } catch (const ingest::BuildFailed& e) {
    err << "ingest failed: " << e.what() << "\n";
    return kExitDataFailure;
  }
}

// ---------------------------------------------------------------------------

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream&) {
  using measures::Perspective;
  const auto snapshot = corpus::load_snapshot(options.snapshot);
  std::optional<corpus::MonthRange> months;
  if (options.months) months = corpus::MonthRange::parse(*options.months);
  const auto& dir = options.out;
  const stats::PermutationOptions perm{options.permutations, options.seed, options.jobs};
  ordered_json summary;
  summary["languages"] = snapshot.languages.size();
  summary["cuisines"] = snapshot.cuisines.size();
  summary["articles"] = snapshot.concept_sets.size();
  summary["source"] = corpus::to_string(options.source);
  summary["thresholds"] = {{"min_cuisines", options.thresholds.min_cuisines},
                           {"min_neighbors", options.thresholds.min_neighbors}};

  // Coverage.
  const auto coverage = measures::coverage_stats(snapshot);
  std::string text = "language\tsize_articles\tcuisine_articles\n";
  std::vector<double> sizes, counts;
  for (const auto& row : coverage) {
    text += fmt::format("{}\t{}\t{}\n", row.language, row.size_articles, row.cuisine_article_count);
    sizes.push_back(static_cast<double>(row.size_articles));
    counts.push_back(static_cast<double>(row.cuisine_article_count));
  }
  tsv::write_file(dir / "coverage" / "coverage.tsv", text);
  ordered_json cov{{"rho", nullptr}, {"p_value", nullptr}};
  try {
    const auto r = stats::spearman(sizes, counts, perm);
    cov = {{"rho", r.rho}, {"p_value", r.p_value}};
  } catch (const Error& e) {
    spdlog::warn("coverage correlation undefined: {}", e.what());
    cov["error"] = e.what();
  }
  summary["coverage_spearman"] = cov;

  // Similarity.
  const measures::Geography geography(snapshot);
  const auto global = measures::cultural_similarity(snapshot, Perspective::Global);
  const auto native = measures::cultural_similarity(snapshot, Perspective::Native);
  report::write_matrix(dir / "similarity" / "global.tsv", global.scores, report::Format::TSV);
  report::write_matrix(dir / "similarity" / "native.tsv", native.scores, report::Format::TSV);
  text = "cuisine\tglobal\tnative\n";
  std::vector<double> ratios_global, ratios_native;
  for (const auto& id : snapshot.cuisine_ids()) {
    const auto g = measures::neighbor_similarity_ratio(global, id, geography, options.thresholds.min_neighbors);
    const auto n = measures::neighbor_similarity_ratio(native, id, geography, options.thresholds.min_neighbors);
    if (g) ratios_global.push_back(*g);
    if (n) ratios_native.push_back(*n);
    text += fmt::format("{}\t{}\t{}\n", id, optional_cell(g), optional_cell(n));
  }
  tsv::write_file(dir / "similarity" / "neighbor_ratio.tsv", text);
  summary["neighbor_ratio"] = {
      {"global", {{"mean", optional_number(mean_of(ratios_global))}, {"cuisines", ratios_global.size()}}},
      {"native", {{"mean", optional_number(mean_of(ratios_native))}, {"cuisines", ratios_native.size()}}}};

  // Understanding.
  const auto understanding = measures::cultural_understanding(snapshot);
  report::write_matrix(dir / "understanding" / "understanding.tsv", understanding.scores, report::Format::TSV);
  report::HeatmapOptions heat;
  heat.title = "Cultural understanding";
  heat.min = 0.0;
  heat.max = 1.0;
  for (const auto& [lang, own] : snapshot.ownership.language_to_own_cuisines)
    for (const auto& c : own) heat.self_cells.emplace(lang, c);
  tsv::write_file(dir / "understanding" / "heatmap.svg", report::render_heatmap(understanding.scores, heat));
  tsv::write_file(dir / "understanding" / "agreement.svg",
                  report::render_ranked_curves(measures::description_agreement(snapshot),
                                               "Agreement between language editions per cuisine"));
  std::vector<double> und_values;
  for (std::size_t l = 0; l < understanding.scores.rows(); ++l)
    for (std::size_t o = 0; o < understanding.scores.cols(); ++o)
      if (const auto& v = understanding.scores.at(l, o); v && !snapshot.ownership.owns(understanding.scores.row_labels()[l], understanding.scores.col_labels()[o]))
        und_values.push_back(*v);
  summary["understanding"] = {{"mean_foreign", optional_number(mean_of(und_values))}, {"cells", und_values.size()}};

  // Affinity, both sources.
  text = "language\tsource\tself_focus\tregional\n";
  ordered_json affinity;
  for (const auto source : {corpus::AttentionSource::Outlinks, corpus::AttentionSource::Views}) {
    const auto range = source == corpus::AttentionSource::Views ? months : std::nullopt;
    const auto bias = measures::bias_matrix(corpus::attention_matrix(snapshot, source, range));
    const auto name = std::string(corpus::to_string(source));
    report::write_matrix(dir / "affinity" / fmt::format("bias_{}.tsv", name), bias.values, report::Format::TSV);
    std::vector<double> sfb, regional;
    for (const auto& s : measures::summarize_biases(bias, snapshot, options.thresholds)) {
      text += fmt::format("{}\t{}\t{}\t{}\n", s.language, name, optional_cell(s.self_focus), optional_cell(s.regional));
      if (s.self_focus) sfb.push_back(*s.self_focus);
      if (s.regional) regional.push_back(*s.regional);
    }
    affinity[name] = {{"mean_self_focus", optional_number(mean_of(sfb))},
                      {"languages_with_self_focus", sfb.size()},
                      {"mean_regional", optional_number(mean_of(regional))},
                      {"languages_with_regional", regional.size()}};
  }
  tsv::write_file(dir / "affinity" / "summaries.tsv", text);
  summary["affinity"] = affinity;
  summary["months"] = months ? json(months->str()) : json(nullptr);

  write_json(dir / "summary.json", summary);
  out << fmt::format("wrote analysis of {} to {}\n", options.snapshot.string(), dir.string());
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  if (!options.synthetic && !options.empirical) {
    err << "simulate: give --empirical <bias.tsv> or --synthetic\n";
    return kExitUsage;
  }
  options.sim.validate();
  options.histogram.validate();
  std::vector<double> empirical;
  if (options.synthetic) {
    auto cfg = options.sim;
    cfg.affinity_sigma = options.synthetic_sigma;
    cfg.seed = derive_seed(options.sim.seed, 0);
    empirical = sim::pooled_bias_sample(cfg, sim::Model::PopularityPlusAffinity, options.synthetic_worlds);
  } else {
    const auto bias = report::read_matrix(*options.empirical);
    std::optional<corpus::CorpusSnapshot> snapshot;
    if (options.snapshot) snapshot = corpus::load_snapshot(*options.snapshot);
    for (std::size_t l = 0; l < bias.rows(); ++l)
      for (std::size_t o = 0; o < bias.cols(); ++o) {
        const auto& v = bias.at(l, o);
        if (!v) continue;
        if (snapshot && snapshot->ownership.owns(bias.row_labels()[l], bias.col_labels()[o])) continue;
        empirical.push_back(*v);
      }
    if (empirical.empty()) {
      err << "simulate: the empirical bias matrix has no usable values\n";
      return kExitUsage;
    }
  }

  const auto fit = sim::fit_models(options.sim, options.lambda_grid, options.sigma_grid, empirical, options.histogram,
                                   options.jobs);
  const auto dir = options.out / "simulation";
  tsv::write_file(dir / "model1_lambda.tsv", sweep_tsv(fit.model1));
  tsv::write_file(dir / "model2_sigma.tsv", sweep_tsv(fit.model2));

  report::LineSeries m2{"model 2", {}};
  for (const auto& r : fit.model2) m2.points.emplace_back(r.param, r.mean_jsd);
  std::vector<report::LineSeries> series{m2};
  if (fit.best_model1) {
    report::LineSeries m1{fmt::format("model 1 (best, lambda={})", tsv::format_double(fit.best_model1->param)), {}};
    for (const auto& r : fit.model2) m1.points.emplace_back(r.param, fit.best_model1->mean_jsd);
    series.push_back(m1);
  }
  tsv::write_file(dir / "jsd.svg", report::render_line_chart(series, "JS divergence to the empirical biases",
                                                             "sigma", "JS divergence"));

  ordered_json j;
  j["empirical"] = {{"synthetic", options.synthetic}, {"values", empirical.size()}};
  if (options.synthetic) {
    j["empirical"]["sigma"] = options.synthetic_sigma;
    j["empirical"]["worlds"] = options.synthetic_worlds;
  }
  j["config"] = {{"communities", options.sim.n_communities},
                 {"affinity_mu", options.sim.affinity_mu},
                 {"self_focus_target", options.sim.self_focus_target},
                 {"replications", options.sim.replications},
                 {"seed", options.sim.seed},
                 {"bins", options.histogram.bins},
                 {"range", {options.histogram.lower, options.histogram.upper}}};
  j["model1_best"] = best_json(fit.best_model1);
  j["model2_best"] = best_json(fit.best_model2);
  write_json(dir / "simulation.json", j);
  out << fmt::format("model 1 best JSD {}, model 2 best JSD {}\n",
                     fit.best_model1 ? tsv::format_double(*fit.best_model1->mean_jsd) : "n/a",
                     fit.best_model2 ? tsv::format_double(*fit.best_model2->mean_jsd) : "n/a");
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err) {
  if (options.externals.empty()) {
    err << "validate: at least one --external ranking is required\n";
    return kExitUsage;
  }
  const auto snapshot = corpus::load_snapshot(options.snapshot);
  const auto& m = options.measures;
  const measures::SimilarityMatrix similarity{report::read_matrix(m / "similarity" / "global.tsv"),
                                              measures::Perspective::Global};
  const measures::UnderstandingMatrix understanding{report::read_matrix(m / "understanding" / "understanding.tsv")};
  const measures::BiasMatrix bias{
      report::read_matrix(m / "affinity" / fmt::format("bias_{}.tsv", corpus::to_string(options.source))),
      options.source};

  std::vector<validate::ExternalRanking> externals;
  for (const auto& p : options.externals) externals.push_back(validate::load_external_ranking(p));
  const stats::PermutationOptions perm{options.permutations, options.seed, options.jobs};
  const auto wiki = validate::understanding_ranking(understanding, snapshot);
  const auto external = validate::correlate_with_external(wiki.ranking, externals, perm);
  const auto cross = validate::cross_measure_correlations(similarity, understanding, bias, snapshot.ownership, perm);

  ordered_json j;
  j["permutations"] = options.permutations;
  j["seed"] = options.seed;
  j["wiki_ranking"] = {{"label", wiki.ranking.source_label()},
                       {"keys", wiki.ranking.size()},
                       {"cells_used", wiki.cells_used},
                       {"cells_missing", wiki.cells_missing}};
  j["external"] = ordered_json::array();
  for (const auto& c : external.comparisons) j["external"].push_back(comparison_json(c));
  j["cross_measure"] = ordered_json::array();
  for (const auto& c : cross.comparisons) j["cross_measure"].push_back(comparison_json(c));

  const auto dir = options.out / "validate";
  if (options.crowd_tasks) {
    const auto ranking = options.crowd_ranking
                             ? validate::load_ranking(*options.crowd_ranking)
                             : validate::similarity_ranking(similarity);
    const auto tasks = validate::generate_crowd_tasks(ranking, *options.crowd_tasks);
    tsv::write_file(dir / "crowd_tasks.tsv", validate::crowd_tasks_tsv(tasks));
    j["crowd_tasks"] = tasks.size();
  }
  if (options.judgments) {
    static constexpr std::string_view kHeader[] = {"task_id", "choice"};
    const auto table =
        tsv::parse(tsv::read_file(*options.judgments), kHeader, options.judgments->filename().string());
    std::vector<validate::Judgment> judgments;
    for (const auto& row : table.rows) {
      const auto& choice = row.fields[1];
      if (choice != "high" && choice != "low") {
        throw ParseError(table.source, row.line, 2, fmt::format("choice must be 'high' or 'low', got '{}'", choice));
      }
      judgments.push_back({row.fields[0], choice == "high"});
    }
    const auto t = validate::tally_majority(judgments);
    j["crowd_tally"] = {{"tasks", t.tasks}, {"majority_high", t.majority_high}, {"majority_low", t.majority_low},
                        {"ties", t.ties}};
  }
  write_json(dir / "correlations.json", j);

  bool any_external = false;
  for (const auto& c : external.comparisons)
    if (c.a == wiki.ranking.source_label() && c.result) any_external = true;
  if (!any_external) {
    err << "validate: no external ranking shares enough keys with the wiki ranking\n";
    return kExitUsage;
  }
  out << fmt::format("wrote {}\n", (dir / "correlations.json").string());
  return kExitOk;
}

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
  if (snapshot.empty()) throw Error("config: 'snapshot' is required");
  if (output_dir.empty()) throw Error("config: 'out' is required");
  if (thresholds.min_cuisines < 1 || thresholds.min_neighbors < 1) throw Error("config: thresholds must be >= 1");
  if (seeds && !static_dir) throw Error("config: 'seeds' needs 'static'");
  if (seeds && !months) throw Error("config: 'seeds' needs 'months'");
  sim.validate();
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir, const std::string& source) {
  RunConfig c;
  auto path = [&](const std::string& v) { return fs::path(v).is_absolute() ? fs::path(v) : base_dir / v; };
  std::size_t line_no = 0;
  for (const auto& raw : tsv::split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, 1, "expected key = value");
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      return std::string(s);
    };
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto fail = [&](const std::string& why) { return ParseError(source, line_no, eq + 2, why); };
    auto integer = [&]() -> long long {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) throw fail(fmt::format("'{}' is not an integer", value));
      return v;
    };
    auto real = [&]() -> double {
      double v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) throw fail(fmt::format("'{}' is not a number", value));
      return v;
    };
    if (key == "snapshot") {
      c.snapshot = path(value);
    } else if (key == "out") {
      c.output_dir = path(value);
    } else if (key == "source") {
      const auto s = corpus::parse_attention_source(value);
      if (!s) throw fail(fmt::format("unknown source '{}'", value));
      c.source = *s;
    } else if (key == "months") {
      corpus::MonthRange::parse(value);
      c.months = value;
    } else if (key == "min_cuisines") {
      c.thresholds.min_cuisines = static_cast<int>(integer());
    } else if (key == "min_neighbors") {
      c.thresholds.min_neighbors = static_cast<int>(integer());
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(integer());
    } else if (key == "jobs") {
      c.jobs = static_cast<unsigned>(std::max(1LL, integer()));
    } else if (key == "seeds") {
      c.seeds = path(value);
    } else if (key == "static") {
      c.static_dir = path(value);
    } else if (key == "replay") {
      c.replay = path(value);
    } else if (key == "max_failure_fraction") {
      c.max_failure_fraction = real();
    } else if (key == "communities") {
      c.sim.n_communities = static_cast<int>(integer());
    } else if (key == "replications") {
      c.sim.replications = static_cast<int>(integer());
    } else if (key == "synthetic") {
      if (value != "true" && value != "false") throw fail("synthetic must be true or false");
      c.synthetic = value == "true";
    } else if (key == "synthetic_sigma") {
      c.synthetic_sigma = real();
    } else if (key == "external") {
      for (const auto& p : tsv::split(value, ','))
        if (!p.empty()) c.externals.push_back(path(p));
    } else if (key == "crowd_tasks") {
      c.crowd_tasks = static_cast<int>(integer());
    } else if (key == "permutations") {
      c.permutations = static_cast<std::size_t>(integer());
    } else {
      throw ParseError(source, line_no, 1, fmt::format("unknown key '{}'", key));
    }
  }
  c.sim.seed = c.seed;
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) throw corpus::MissingFile(path);
  return parse_run_config(tsv::read_file(path), path.parent_path(), path.filename().string());
}

int cmd_all(const RunConfig& config, std::ostream& out, std::ostream& err) {
  config.validate();
  if (config.seeds) {
    IngestOptions in;
    in.seeds = *config.seeds;
    in.months = *config.months;
    in.static_dir = *config.static_dir;
    in.out = config.snapshot;
    in.replay = config.replay;
    in.policy.max_concurrent_requests = static_cast<int>(std::min(config.jobs, 16u));
    in.max_failure_fraction = config.max_failure_fraction;
    if (const int rc = cmd_ingest(in, out, err); rc != kExitOk) return rc;
  }

  AnalyzeOptions an;
  an.snapshot = config.snapshot;
  an.out = config.output_dir;
  an.source = config.source;
  an.months = config.months;
  an.thresholds = config.thresholds;
  an.permutations = config.permutations;
  an.seed = config.seed;
  an.jobs = config.jobs;
  if (const int rc = cmd_analyze(an, out, err); rc != kExitOk) return rc;

  SimulateOptions si;
  si.sim = config.sim;
  si.synthetic = config.synthetic;
  si.synthetic_sigma = config.synthetic_sigma;
  if (!config.synthetic) {
    si.empirical = config.output_dir / "affinity" / fmt::format("bias_{}.tsv", corpus::to_string(config.source));
    si.snapshot = config.snapshot;
  }
  si.out = config.output_dir;
  si.jobs = config.jobs;
  if (const int rc = cmd_simulate(si, out, err); rc != kExitOk) return rc;

  if (!config.externals.empty()) {
    ValidateOptions va;
    va.measures = config.output_dir;
    va.snapshot = config.snapshot;
    va.externals = config.externals;
    va.crowd_tasks = config.crowd_tasks;
    va.source = config.source;
    va.out = config.output_dir;
    va.permutations = config.permutations;
    va.seed = config.seed;
    va.jobs = config.jobs;
    return cmd_validate(va, out, err);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ccrm: cultural relations measured from multilingual Wikipedia", "ccrm"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "ccrm 0.1.0");
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();

  std::uint64_t seed = 0;
  unsigned jobs = 1;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Seed for every random draw")->capture_default_str();
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  };

  IngestOptions in;
  auto* ingest_cmd = app.add_subcommand("ingest", "Fetch seed articles and write a corpus snapshot");
  ingest_cmd->add_option("--seeds", in.seeds, "Seed TSV (language, cuisine_id, article_title, article_url)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--months", in.months, "Inclusive view range YYYY-MM:YYYY-MM")->required();
  ingest_cmd->add_option("--static", in.static_dir, "Directory with languages, cuisines, ownership, adjacency")
      ->required()
      ->check(CLI::ExistingDirectory);
  ingest_cmd->add_option("--out", in.out, "Snapshot output directory")->required();
  ingest_cmd->add_option("--replay", in.replay, "Serve requests from recorded responses in this directory")
      ->check(CLI::ExistingDirectory);
  ingest_cmd->add_option("--record", in.record, "Record every response into this directory");
  ingest_cmd->add_option("--interval-ms", in.policy.min_request_interval_ms, "Minimum gap between requests to a host")
      ->capture_default_str();
  ingest_cmd->add_option("--retries", in.policy.retries, "Retries per request")->capture_default_str();
  ingest_cmd->add_option("--backoff-ms", in.policy.backoff_base_ms, "Base of the exponential backoff")
      ->capture_default_str();
  ingest_cmd->add_option("--timeout-ms", in.policy.timeout_ms, "Per-request timeout")->capture_default_str();
  ingest_cmd->add_option("--max-failure-fraction", in.max_failure_fraction,
                         "Fail when more than this fraction of seeds fail")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  common(ingest_cmd);

  AnalyzeOptions an;
  std::string an_source = "views";
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute every measure on a snapshot");
  analyze_cmd->add_option("--snapshot", an.snapshot, "Snapshot directory")->required()->check(CLI::ExistingDirectory);
  analyze_cmd->add_option("--out", an.out, "Output directory")->required();
  analyze_cmd->add_option("--source", an_source, "Attention source for the summary: views or outlinks")
      ->check(CLI::IsMember({"views", "outlinks"}))
      ->capture_default_str();
  analyze_cmd->add_option("--months", an.months, "Restrict views to YYYY-MM:YYYY-MM");
  analyze_cmd->add_option("--min-cuisines", an.thresholds.min_cuisines, "Self-focus coverage threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze_cmd->add_option("--min-neighbors", an.thresholds.min_neighbors, "Neighbor threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze_cmd->add_option("--permutations", an.permutations, "Permutations for Spearman p-values")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  common(analyze_cmd);

  SimulateOptions si;
  std::string lambda_grid, sigma_grid;
  auto* simulate_cmd = app.add_subcommand("simulate", "Fit the attention models to a bias distribution");
  auto* emp = simulate_cmd->add_option("--empirical", si.empirical, "Bias matrix TSV written by analyze")
                  ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--snapshot", si.snapshot, "Snapshot whose ownership removes own-cuisine cells")
      ->check(CLI::ExistingDirectory);
  simulate_cmd->add_flag("--synthetic", si.synthetic, "Use Model 2 data as the empirical sample")->excludes(emp);
  simulate_cmd->add_option("--synthetic-sigma", si.synthetic_sigma, "Sigma of the synthetic data")
      ->capture_default_str();
  simulate_cmd->add_option("--synthetic-worlds", si.synthetic_worlds, "Simulated worlds pooled into the sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate_cmd->add_option("--communities", si.sim.n_communities, "Communities per simulated world")
      ->capture_default_str();
  simulate_cmd->add_option("--replications", si.sim.replications, "Replications per grid point")
      ->capture_default_str();
  simulate_cmd->add_option("--mu", si.sim.affinity_mu, "Affinity mean")->capture_default_str();
  simulate_cmd->add_option("--self-focus", si.sim.self_focus_target, "Calibration target")->capture_default_str();
  simulate_cmd->add_option("--lambda-grid", lambda_grid, "Comma-separated lambda values");
  simulate_cmd->add_option("--sigma-grid", sigma_grid, "Comma-separated sigma values");
  simulate_cmd->add_option("--bins", si.histogram.bins, "Histogram bins on [-1, 1]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate_cmd->add_option("--out", si.out, "Output directory")->required();
  common(simulate_cmd);

  ValidateOptions va;
  std::string va_source = "views";
  auto* validate_cmd = app.add_subcommand("validate", "Correlate measures with external rankings");
  validate_cmd->add_option("--measures", va.measures, "Output directory of analyze")
      ->required()
      ->check(CLI::ExistingDirectory);
  validate_cmd->add_option("--snapshot", va.snapshot, "Snapshot the measures came from")
      ->required()
      ->check(CLI::ExistingDirectory);
  validate_cmd->add_option("--external", va.externals, "External ranking TSV (repeatable)")->check(CLI::ExistingFile);
  validate_cmd->add_option("--source", va_source, "Bias matrix to use: views or outlinks")
      ->check(CLI::IsMember({"views", "outlinks"}))
      ->capture_default_str();
  validate_cmd->add_option("--crowd-tasks", va.crowd_tasks, "Write k*k crowd tasks from the top and bottom k pairs")
      ->check(CLI::PositiveNumber);
  validate_cmd->add_option("--crowd-ranking", va.crowd_ranking, "Ranking for crowd tasks (default: global similarity)")
      ->check(CLI::ExistingFile);
  validate_cmd->add_option("--judgments", va.judgments, "Crowd answers TSV (task_id, choice) to tally")
      ->check(CLI::ExistingFile);
  validate_cmd->add_option("--permutations", va.permutations, "Permutations for Spearman p-values")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  validate_cmd->add_option("--out", va.out, "Output directory")->required();
  common(validate_cmd);

  fs::path config_path;
  auto* all_cmd = app.add_subcommand("all", "Run the whole pipeline from a key = value config file");
  all_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  try {
    if (ingest_cmd->parsed()) {
      in.policy.max_concurrent_requests = static_cast<int>(std::min(jobs, 16u));
      return cmd_ingest(in, out, err);
    }
    if (analyze_cmd->parsed()) {
      an.source = *corpus::parse_attention_source(an_source);
      an.seed = seed;
      an.jobs = jobs;
      return cmd_analyze(an, out, err);
    }
    if (simulate_cmd->parsed()) {
      if (!lambda_grid.empty()) si.lambda_grid = parse_grid(lambda_grid);
      if (!sigma_grid.empty()) si.sigma_grid = parse_grid(sigma_grid);
      si.sim.seed = seed;
      si.jobs = jobs;
      return cmd_simulate(si, out, err);
    }
    if (validate_cmd->parsed()) {
      va.source = *corpus::parse_attention_source(va_source);
      va.seed = seed;
      va.jobs = jobs;
      return cmd_validate(va, out, err);
    }
    return cmd_all(load_run_config(config_path), out, err);
  } catch (const ingest::BuildFailed& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace ccrm::cli
