#include "ccrm/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "ccrm/measures.hpp"

namespace ccrm::sim {

void SimConfig::validate() const {
  if (n_communities < 3) throw Error(fmt::format("simulation needs at least 3 communities, got {}", n_communities));
  if (!(lambda > 0)) throw Error("simulation lambda must be positive");
  if (!(affinity_mu > 0)) throw Error("simulation affinity mean must be positive");
  if (!(affinity_sigma >= 0)) throw Error("simulation affinity sigma must be nonnegative");
  if (!(attention_mass_per_community > 0)) throw Error("attention mass must be positive");
  if (replications < 1) throw Error("replications must be positive");
  if (max_calibration_iterations < 1) throw Error("calibration iterations must be positive");
  if (!(calibration_tolerance > 0)) throw Error("calibration tolerance must be positive");
}

std::string_view to_string(Model m) { return m == Model::PopularityOnly ? "model1" : "model2"; }

std::vector<double> draw_popularities(std::size_t n, double lambda, Rng& rng) {
  if (!(lambda > 0)) throw Error("lambda must be positive");
  std::vector<double> out(n);
  for (auto& v : out) v = rng.exponential(lambda);
  return out;
}

namespace {

std::vector<std::string> community_labels(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(fmt::format("c{:03}", i));
  return out;
}

struct World {
  std::size_t n = 0;
  double mass = 1;
  std::vector<double> off;   // n*n base weights, diagonal unused
  std::vector<double> self;  // base self weight per community
  std::vector<std::string> labels;

  corpus::AttentionMatrix build(double k) const {
    corpus::AttentionMatrix m;
    m.languages = labels;
    m.cuisines = labels;
    m.values.assign(n * n, 0.0);
    m.missing.assign(n * n, 0);
    for (std::size_t l = 0; l < n; ++l) {
      double total = k * self[l];
      for (std::size_t o = 0; o < n; ++o)
        if (o != l) total += off[l * n + o];
      for (std::size_t o = 0; o < n; ++o) {
        const double w = o == l ? k * self[l] : off[l * n + o];
        m.values[l * n + o] = mass * w / total;
      }
    }
    return m;
  }
};

}  // namespace

double mean_self_focus(const corpus::AttentionMatrix& attention) {
  const auto bias = measures::bias_matrix(attention);
  corpus::OwnershipMap ownership;
  const auto n = std::min(attention.language_count(), attention.cuisine_count());
  for (std::size_t i = 0; i < n; ++i) ownership.language_to_own_cuisines[attention.languages[i]] = {attention.cuisines[i]};
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto sfb = measures::self_focus(bias, ownership, attention.languages[i], 1);
    if (!sfb) throw CalibrationFailed(fmt::format("self-focus undefined for community {}", attention.languages[i]));
    sum += *sfb;
  }
  return sum / static_cast<double>(n);
}

SimResult generate_attention(const SimConfig& config, Model model, Rng& rng) {
  config.validate();
  World world;
  world.n = static_cast<std::size_t>(config.n_communities);
  world.mass = config.attention_mass_per_community;
  world.labels = community_labels(config.n_communities);
  const auto n = world.n;

  const auto pop = draw_popularities(n, config.lambda, rng);
  std::vector<double> affinity(n * n, 1.0);
  if (model == Model::PopularityPlusAffinity) {
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t o = 0; o < n; ++o) {
        if (o == l) continue;
        const double a = std::max(rng.normal(config.affinity_mu, config.affinity_sigma), kAffinityFloor);
        affinity[l * n + o] = a / config.affinity_mu;
      }
  }
  world.off.assign(n * n, 0.0);
  world.self.assign(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    double affinity_sum = 0;
    for (std::size_t o = 0; o < n; ++o) {
      if (o == l) continue;
      world.off[l * n + o] = pop[o] * affinity[l * n + o];
      affinity_sum += affinity[l * n + o];
    }
    world.self[l] = pop[l] * affinity_sum / static_cast<double>(n - 1);
  }

  // Mean self-focus is increasing in k: it equals the sum of diagonal biases
  // over (n - 1), and each diagonal share grows with k.
  const double target = config.self_focus_target;
  auto focus_at = [&](double k) { return mean_self_focus(world.build(k)); };
  int iterations = 0;
  double lo = 0.0;
  double hi = 1.0;
  double lo_value = focus_at(lo);
  if (lo_value > target + config.calibration_tolerance) {
    throw CalibrationFailed(fmt::format("self-focus target {} is below the minimum {}", target, lo_value));
  }
  double hi_value = focus_at(hi);
  while (hi_value < target) {
    if (++iterations >= config.max_calibration_iterations) {
      throw CalibrationFailed(fmt::format("self-focus target {} not reachable (reached {})", target, hi_value));
    }
    lo = hi;
    lo_value = hi_value;
    hi *= 2.0;
    hi_value = focus_at(hi);
  }
  double k = hi;
  double achieved = hi_value;
  while (std::abs(achieved - target) > config.calibration_tolerance * 0.01) {
    if (++iterations >= config.max_calibration_iterations) break;
    const double mid = 0.5 * (lo + hi);
    const double value = focus_at(mid);
    k = mid;
    achieved = value;
    if (value < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(achieved - target) > config.calibration_tolerance) {
    throw CalibrationFailed(fmt::format("calibration stopped at self-focus {} (target {} ± {}) after {} iterations",
                                        achieved, target, config.calibration_tolerance, iterations));
  }

  SimResult result;
  result.attention = world.build(k);
  result.self_weight_multiplier = k;
  result.achieved_self_focus = achieved;
  const auto bias = measures::bias_matrix(result.attention);
  result.bias_values.reserve(n * (n - 1));
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t o = 0; o < n; ++o)
      if (o != l) result.bias_values.push_back(*bias.values.at(l, o));
  return result;
}

std::vector<SweepRow> sweep(const SimConfig& base, Model model, SweepParameter parameter, std::span<const double> grid,
                            std::span<const double> empirical_bias, const stats::HistogramSpec& hist_spec,
                            unsigned jobs) {
  if (grid.empty()) throw Error("sweep: empty parameter grid");
  if (empirical_bias.empty()) throw Error("sweep: empty empirical bias sample");
  base.validate();
  hist_spec.validate();

  std::vector<double> params(grid.begin(), grid.end());
  std::sort(params.begin(), params.end());
  const auto reps = static_cast<std::size_t>(base.replications);
  const auto empirical = stats::histogram(empirical_bias, hist_spec);

  std::vector<std::optional<double>> jsd(params.size() * reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t task = next++; task < jsd.size(); task = next++) {
      const auto p = task / reps;
      const auto r = task % reps;
      SimConfig cfg = base;
      (parameter == SweepParameter::Lambda ? cfg.lambda : cfg.affinity_sigma) = params[p];
      Rng rng(derive_seed(base.seed, p, r));
      try {
        const auto result = generate_attention(cfg, model, rng);
        jsd[task] = stats::js_divergence(stats::histogram(result.bias_values, hist_spec), empirical);
      } catch (const CalibrationFailed&) {
        jsd[task] = std::nullopt;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(jsd.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<SweepRow> rows;
  for (std::size_t p = 0; p < params.size(); ++p) {
    std::vector<double> ok;
    for (std::size_t r = 0; r < reps; ++r)
      if (const auto& v = jsd[p * reps + r]) ok.push_back(*v);
    SweepRow row{params[p], std::nullopt, 0.0, static_cast<int>(ok.size())};
    if (!ok.empty()) {
      row.mean_jsd = stats::mean(ok);
      row.std_jsd = stats::sample_stddev(ok);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> default_lambda_grid() { return {0.1, 0.25, 0.5, 1, 2, 4, 8}; }
std::vector<double> default_sigma_grid() { return {0, 5, 10, 20, 30, 40, 60}; }

std::optional<SweepRow> best_row(std::span<const SweepRow> rows) {
  std::optional<SweepRow> best;
  for (const auto& r : rows) {
    if (!r.mean_jsd) continue;
    if (!best || *r.mean_jsd < *best->mean_jsd) best = r;
  }
  return best;
}

std::vector<double> pooled_bias_sample(const SimConfig& config, Model model, int worlds) {
  if (worlds < 1) throw Error("pooled sample needs at least one world");
  std::vector<double> out;
  for (int r = 0; r < worlds; ++r) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    const auto result = generate_attention(config, model, rng);
    out.insert(out.end(), result.bias_values.begin(), result.bias_values.end());
  }
  return out;
}

FitResult fit_models(const SimConfig& base, std::span<const double> lambda_grid, std::span<const double> sigma_grid,
                     std::span<const double> empirical_bias, const stats::HistogramSpec& hist_spec, unsigned jobs) {
  FitResult fit;
  SimConfig m1 = base;
  m1.seed = derive_seed(base.seed, 1);
  fit.model1 = sweep(m1, Model::PopularityOnly, SweepParameter::Lambda, lambda_grid, empirical_bias, hist_spec, jobs);
  fit.best_model1 = best_row(fit.model1);
  SimConfig m2 = base;
  m2.seed = derive_seed(base.seed, 2);
  if (fit.best_model1) m2.lambda = fit.best_model1->param;
  fit.model2 =
      sweep(m2, Model::PopularityPlusAffinity, SweepParameter::Sigma, sigma_grid, empirical_bias, hist_spec, jobs);
  fit.best_model2 = best_row(fit.model2);
  return fit;
}

}  // namespace ccrm::sim
