#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "percograph/cluster_distribution.hpp"
#include "percograph/lattice.hpp"

namespace percograph::experiments {

using dist::ClusterSizeDistribution;
using lattice::Boundary;

/// Malformed experiment configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// An acceptance assertion embedded in a config and evaluated in check mode.
struct CheckSpec {
  std::string kind;  // beta_match | kappa_match | giant_below | giant_above |
                     // transition_localized | subcritical_bound
  double p = 0.0;
  double c = 0.0;
  double tol = 0.0;
  double threshold = 0.0;
};

struct ExperimentConfig {
  int d = 1;
  std::vector<int> N{1000};  // several values only matter for subcritical scaling
  Boundary boundary = Boundary::kTorus;
  std::vector<double> p_grid{0.0};
  std::vector<double> c_grid{0.0};
  std::uint64_t replicates = 20;
  std::uint64_t base_seed = 1;
  std::uint64_t k_max = 20;  // per-k table rows
  double tol = 1e-10;
  double z = 1.96;  // CI multiplier
  int threads = 1;
  // Plug-in cluster law for d >= 2: pure percolation runs at this radius.
  int estimation_N = 200;
  std::uint64_t estimation_replicates = 20;
  std::string output;  // path prefix; empty means do not write files
  std::vector<CheckSpec> checks;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  double ci_half = 0.0;  // z std / sqrt(n)
};

Stat summarize(const std::vector<double>& xs, double z);
/// Nearest-rank quantile.
double quantile(std::vector<double> xs, double q);

struct PerK {
  std::uint64_t k = 0;
  double mean = 0.0;  // mean over replicates of N_k / K_N
  double se = 0.0;
  double mu = 0.0;  // theory type measure
};

struct CellSummary {
  std::size_t cell = 0;
  int d = 1;
  int N = 0;
  Boundary boundary = Boundary::kTorus;
  double p = 0.0;
  double c = 0.0;
  std::uint64_t replicates = 0;
  std::uint64_t failed = 0;
  std::uint64_t n_vertices = 0;
  Stat c1_frac, c2_frac, kn_frac, c1_log;
  double c1_log_p95 = 0.0;
  std::vector<double> c1_frac_samples;
  std::vector<double> c1_log_samples;
  std::vector<PerK> per_k;
  // Theory join.
  double c_cr = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  double kappa = 0.0;
};

/// Law fed to the theory join: exact for d = 1, plug-in empirical otherwise.
ClusterSizeDistribution theory_distribution(const ExperimentConfig& config, double p);

/// Pure percolation (c = 0) estimation runs at (config.d, estimation_N, p).
ClusterSizeDistribution estimate_cluster_law(const ExperimentConfig& config, double p);

/// Seeded replicates at one (N, p, c); replicate r of cell i uses seed
/// mix(base_seed, i, r). Fails when more than 10% of replicates throw.
CellSummary run_cell(const ExperimentConfig& config, std::size_t cell, int N, double p, double c);
CellSummary run_cell(const ExperimentConfig& config, std::size_t cell, int N, double p, double c,
                     const ClusterSizeDistribution& law);

struct Transition {
  double fixed = 0.0;         // the parameter held constant (p for a c sweep)
  bool along_c = true;
  double theory = 0.0;        // c_cr(p) or p_cr(c); NaN when undefined
  double crossing = 0.0;      // first grid value with mean C1/n > 0.05; NaN if none
  double grid_step = 0.0;
  bool localized = false;     // |crossing - theory| <= grid_step
};

inline constexpr double kGiantThreshold = 0.05;

struct SweepResult {
  std::vector<CellSummary> cells;  // p-major, c-minor
  std::vector<Transition> transitions;
};

/// All (p, c) cells at config.N.front().
SweepResult sweep(const ExperimentConfig& config);

struct ScalingRow {
  int N = 0;
  std::uint64_t n_vertices = 0;
  double c1_log_p95 = 0.0;
  double c1_log_mean = 0.0;
  double alpha = 0.0;
  double bound = 0.0;  // 1.5 alpha
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  bool within_bound = false;
  bool non_increasing = false;
};

/// C1 / log|B(N)| across config.N for a subcritical (p, c).
ScalingResult subcritical_scaling(const ExperimentConfig& config, double p, double c);

struct ConcentrationRow {
  std::uint64_t k = 0;
  double mean = 0.0;
  double se = 0.0;
  double mu = 0.0;
  bool within_3se = false;
  double envelope = 0.0;  // eps k^nu mu~(k) with eps = 0.5, nu = 3
  bool envelope_violated = false;
};

std::vector<ConcentrationRow> concentration_check(const ExperimentConfig& config, double p,
                                                  double c);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> evaluate_checks(const ExperimentConfig& config, const SweepResult& sweep);

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells,
                       const std::string& invocation);
void write_per_k_csv(std::ostream& out, const std::vector<CellSummary>& cells,
                     const std::string& invocation);

/// Replicate parallelism from PERCOGRAPH_THREADS when no explicit value is given.
int resolve_threads(std::optional<int> requested);

}  // namespace percograph::experiments
