#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ccrm/corpus.hpp"
#include "ccrm/rng.hpp"
#include "ccrm/stats.hpp"

namespace ccrm::sim {

class CalibrationFailed : public Error {
 public:
  using Error::Error;
};

/// Synthetic square world: community i owns practice i.
struct SimConfig {
  int n_communities = 30;
  double lambda = 1.0;              // rate of the exponential popularity draw
  double affinity_mu = 10.0;
  double affinity_sigma = 0.0;
  double self_focus_target = 0.242;
  double attention_mass_per_community = 1.0;
  std::uint64_t seed = 0;
  int replications = 20;
  int max_calibration_iterations = 100;
  double calibration_tolerance = 0.005;

  void validate() const;
};

enum class Model {
  PopularityOnly,         // weights follow practice popularity alone
  PopularityPlusAffinity, // popularity times a pairwise affinity
};

std::string_view to_string(Model m);

struct SimResult {
  corpus::AttentionMatrix attention;
  std::vector<double> bias_values;  // bias(l, o) for every l != o, row-major
  double achieved_self_focus = 0;
  double self_weight_multiplier = 0;
};

// Floor applied to normal affinity draws so every weight stays positive.
inline constexpr double kAffinityFloor = 1e-3;

// n i.i.d. Exp(lambda) draws, all strictly positive.
std::vector<double> draw_popularities(std::size_t n, double lambda, Rng& rng);

/// Draws popularities (and, for Model 2, affinities), then finds the self
/// weight multiplier k by bisection so that the mean self-focus bias of the
/// generated matrix hits the target.
///
/// Off-diagonal weights are w(l,o) = pop(o) · a(l,o)/μ with a ≡ μ under
/// Model 1 and a ~ max(Normal(μ, σ), 1e-3) under Model 2. The own weight is
/// w(l,l) = k · pop(l) · mean_{o≠l} a(l,o)/μ. Rows are normalized to the
/// attention mass.
SimResult generate_attention(const SimConfig& config, Model model, Rng& rng);

// Mean self-focus bias of a square attention matrix whose community i owns
// practice i.
double mean_self_focus(const corpus::AttentionMatrix& attention);

enum class SweepParameter { Lambda, Sigma };

struct SweepRow {
  double param = 0;
  std::optional<double> mean_jsd;  // missing when every replication failed to calibrate
  double std_jsd = 0;
  int n_ok = 0;
};

/// For each grid value, runs `replications` seeded simulations and records the
/// mean Jensen-Shannon divergence between the histogram of simulated
/// off-diagonal biases and that of `empirical_bias`. Rows come back sorted by
/// parameter value. Cells may run in parallel (`jobs`); the result is the same.
std::vector<SweepRow> sweep(const SimConfig& base, Model model, SweepParameter parameter, std::span<const double> grid,
                            std::span<const double> empirical_bias, const stats::HistogramSpec& hist_spec,
                            unsigned jobs = 1);

std::vector<double> default_lambda_grid();
std::vector<double> default_sigma_grid();

// Row with the smallest mean JSD; ties go to the smaller parameter.
std::optional<SweepRow> best_row(std::span<const SweepRow> rows);

// Off-diagonal biases of `worlds` independent simulations, concatenated.
// World r draws from Rng(derive_seed(config.seed, r)).
std::vector<double> pooled_bias_sample(const SimConfig& config, Model model, int worlds);

struct FitResult {
  std::vector<SweepRow> model1;  // over lambda
  std::vector<SweepRow> model2;  // over sigma, at the best lambda
  std::optional<SweepRow> best_model1;
  std::optional<SweepRow> best_model2;
};

// Model 1 over the lambda grid, then Model 2 over the sigma grid using the
// lambda that fit best. The two sweeps use seeds derived from base.seed.
FitResult fit_models(const SimConfig& base, std::span<const double> lambda_grid, std::span<const double> sigma_grid,
                     std::span<const double> empirical_bias, const stats::HistogramSpec& hist_spec, unsigned jobs = 1);

}  // namespace ccrm::sim
