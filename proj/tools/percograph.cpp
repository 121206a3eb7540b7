// percograph command-line front end.
//
// Exit status: 0 success, 1 acceptance check failed, 2 usage or config error,
// 3 numeric-domain error.
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "percograph/branching.hpp"
#include "percograph/cluster_distribution.hpp"
#include "percograph/errors.hpp"
#include "percograph/experiments.hpp"
#include "percograph/format.hpp"
#include "percograph/lattice.hpp"
#include "percograph/merged_graph.hpp"
#include "percograph/theory.hpp"

#ifndef PERCOGRAPH_VERSION
#define PERCOGRAPH_VERSION "unknown"
#endif

namespace pg = percograph;
using nlohmann::json;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

struct LatticeFlags {
  int d = 1;
  int N = 0;
  std::string boundary = "torus";
  double p = 0.0;
  std::uint64_t seed = 1;
};

struct Output {
  std::string format = "csv";
  std::string path;
};

std::string invocation;

void add_lattice_flags(CLI::App* cmd, LatticeFlags& f) {
  cmd->add_option("--d", f.d, "lattice dimension")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--N", f.N, "box radius; the box has (2N+1)^d vertices")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--boundary", f.boundary, "box boundary")
      ->capture_default_str()
      ->check(CLI::IsMember({"torus", "free"}));
  cmd->add_option("--p", f.p, "bond probability in [0,1]")->required()->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", f.seed, "percolation seed")->capture_default_str();
}

void add_output_flags(CLI::App* cmd, Output& o) {
  cmd->add_option("--format", o.format, "output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output", o.path, "output file (default: standard output)");
}

// Writes to the requested file, or standard output.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::invalid_argument("cannot open output file '" + path + "'");
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string header(const std::string& kind) {
  return "# percograph " + kind + " schema v" + std::to_string(pg::kCsvSchemaVersion) + "; " +
         invocation + "\n";
}

json provenance() { return {{"schema_version", pg::kCsvSchemaVersion}, {"invocation", invocation}}; }

pg::dist::ClusterSizeDistribution read_dist_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open distribution file '" + path + "'");
  return pg::dist::read_csv(in);
}

int run_percolate(const LatticeFlags& f, const Output& o) {
  const auto geom = pg::lattice::build_geometry(f.d, f.N, pg::lattice::boundary_from_string(f.boundary));
  const auto census = pg::lattice::cluster_census(pg::lattice::sample_percolation(geom, f.p, f.seed));
  Sink sink(o.path);
  if (o.format == "json") {
    json j = provenance();
    j["d"] = f.d;
    j["N"] = f.N;
    j["boundary"] = f.boundary;
    j["p"] = f.p;
    j["seed"] = f.seed;
    j["n_vertices"] = census.n_vertices;
    j["n_clusters"] = census.n_clusters;
    j["max_size"] = census.max_size;
    j["counts"] = json::array();
    for (const auto& [k, n] : census.counts) j["counts"].push_back({{"k", k}, {"N_k", n}});
    sink.out() << j.dump(2) << "\n";
  } else {
    sink.out() << header("census");
    pg::lattice::write_census_csv(sink.out(), census);
  }
  return 0;
}

int run_merge(const LatticeFlags& f, double c, std::uint64_t long_seed, const Output& o) {
  const auto geom = pg::lattice::build_geometry(f.d, f.N, pg::lattice::boundary_from_string(f.boundary));
  const auto base = pg::lattice::sample_percolation(geom, f.p, f.seed);
  const auto merged = pg::merged::overlay_long_range(base, c, long_seed);
  Sink sink(o.path);
  if (o.format == "json") {
    json j = provenance();
    j["seed"] = merged.seed();
    j["d"] = f.d;
    j["N"] = f.N;
    j["p"] = f.p;
    j["c"] = c;
    j["K_N"] = base.n_clusters();
    j["C1"] = merged.C1();
    j["C2"] = merged.C2();
    j["n_long_edges"] = merged.long_edges().size();
    sink.out() << j.dump(2) << "\n";
  } else {
    sink.out() << header("merge summary") << pg::merged::summary_csv_header() << "\n"
               << pg::merged::summary_csv_row(merged) << "\n";
  }
  return 0;
}

int run_theory(bool d1_exact, std::optional<double> p, const std::string& dist_path, int d,
               double c, std::optional<double> tol, const Output& o) {
  if (d1_exact == !dist_path.empty())
    throw std::invalid_argument("theory needs exactly one of --d1-exact or --dist");
  if (d1_exact && !p) throw std::invalid_argument("--d1-exact requires --p");
  const auto law = d1_exact ? pg::dist::ClusterSizeDistribution::exact_d1(*p) : read_dist_csv(dist_path);
  const double pv = p.value_or(std::numeric_limits<double>::quiet_NaN());
  const auto point = pg::theory::theory_point(law, d1_exact ? 1 : d, pv, c,
                                              tol.value_or(pg::theory::default_tolerance(law)));
  Sink sink(o.path);
  if (o.format == "json") {
    json j = pg::theory::to_json(point);
    j.update(provenance());
    sink.out() << j.dump(2) << "\n";
  } else {
    sink.out() << header("theory") << pg::theory::theory_csv_header() << "\n"
               << pg::theory::to_csv_row(point) << "\n";
  }
  return 0;
}

int run_branch(std::uint64_t k, double c, bool p0, std::optional<double> p,
               const std::string& dist_path, std::uint64_t reps, std::uint64_t seed,
               const pg::branching::Caps& caps, const Output& o) {
  const int sources = int{p0} + int{p.has_value()} + int{!dist_path.empty()};
  if (sources != 1) throw std::invalid_argument("branch needs exactly one of --p0, --p or --dist");
  std::string tag;
  pg::dist::ClusterSizeDistribution law = pg::dist::ClusterSizeDistribution::point_mass();
  if (p0) {
    tag = "point_mass";
  } else if (p) {
    law = pg::dist::ClusterSizeDistribution::exact_d1(*p);
    tag = "exact_d1(" + pg::format_number(*p) + ")";
  } else {
    law = read_dist_csv(dist_path);
    tag = "table";
  }
  const auto s = pg::branching::estimate_survival(k, c, law, reps, caps, seed);
  Sink sink(o.path);
  if (o.format == "json") {
    json j = provenance();
    j["k"] = s.k;
    j["c"] = s.c;
    j["p_or_dist_tag"] = tag;
    j["reps"] = s.reps;
    j["rho_hat"] = s.rho_hat;
    j["ci_lo"] = s.ci_lo;
    j["ci_hi"] = s.ci_hi;
    j["standard_error"] = s.standard_error;
    j["ambiguous_fraction"] = s.ambiguous_fraction;
    sink.out() << j.dump(2) << "\n";
  } else {
    sink.out() << header("survival") << pg::branching::survival_csv_header() << "\n"
               << pg::branching::survival_csv_row(s, tag) << "\n";
  }
  return 0;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
  out << text;
}

int run_experiment(const std::string& config_path, bool check, std::optional<int> threads,
                   const std::string& output) {
  auto config = pg::experiments::load_config(config_path);
  config.threads = pg::experiments::resolve_threads(threads ? threads : std::optional<int>{});
  if (!output.empty()) config.output = output;
  if (check && config.checks.empty()) throw pg::experiments::ConfigError("config has no 'checks'");

  const auto result = pg::experiments::sweep(config);
  std::ostringstream summary, per_k;
  pg::experiments::write_summary_csv(summary, result.cells, invocation);
  pg::experiments::write_per_k_csv(per_k, result.cells, invocation);
  if (!config.output.empty()) {
    write_file(config.output + "_summary.csv", summary.str());
    write_file(config.output + "_per_k.csv", per_k.str());
  } else if (!check) {
    std::cout << summary.str();
  }
  for (const auto& t : result.transitions)
    std::cerr << "transition along " << (t.along_c ? "c at p=" : "p at c=")
              << pg::format_number(t.fixed) << ": crossing " << pg::format_number(t.crossing)
              << ", theory " << pg::format_number(t.theory)
              << (t.localized ? " (localized)" : " (not localized)") << "\n";
  if (!check) return 0;

  int failed = 0;
  for (const auto& r : pg::experiments::evaluate_checks(config, result)) {
    failed += !r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
  }
  return failed == 0 ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) invocation += (i ? " " : "") + std::string(i ? argv[i] : "percograph");

  CLI::App app{"Bond percolation with Erdos-Renyi long-range edges: simulation and theory."};
  app.set_version_flag("--version", std::string("percograph ") + PERCOGRAPH_VERSION);
  app.require_subcommand(1);
  app.footer(
      "Exit status: 0 success, 1 acceptance check failed, 2 usage or config error, "
      "3 numeric-domain error.\nPERCOGRAPH_THREADS sets the thread count when --threads is absent.");

  LatticeFlags lattice_flags;
  Output out_flags;

  auto* percolate = app.add_subcommand("percolate", "sample bond percolation and print the cluster census");
  add_lattice_flags(percolate, lattice_flags);
  add_output_flags(percolate, out_flags);

  auto* merge = app.add_subcommand("merge", "overlay long-range edges and summarize components");
  add_lattice_flags(merge, lattice_flags);
  double merge_c = 0.0;
  std::optional<std::uint64_t> long_seed;
  merge->add_option("--c", merge_c, "long-range intensity; each pair joins with probability c/|B(N)|")
      ->required()
      ->check(CLI::NonNegativeNumber);
  merge->add_option("--long-seed", long_seed, "long-range edge seed (default: --seed)");
  add_output_flags(merge, out_flags);

  auto* theory = app.add_subcommand("theory", "evaluate c_cr, phase, beta, alpha and the critical slope");
  bool d1_exact = false;
  std::optional<double> theory_p, theory_tol;
  std::string theory_dist;
  int theory_d = 1;
  double theory_c = 0.0;
  theory->add_flag("--d1-exact", d1_exact, "use the exact one-dimensional cluster-size law");
  theory->add_option("--p", theory_p, "bond probability in [0,1) for --d1-exact")->check(CLI::Range(0.0, 1.0));
  theory->add_option("--dist", theory_dist, "cluster-size law as CSV (k,probability)")->check(CLI::ExistingFile);
  theory->add_option("--d", theory_d, "dimension reported for --dist")->capture_default_str();
  theory->add_option("--c", theory_c, "long-range intensity")->required()->check(CLI::NonNegativeNumber);
  theory->add_option("--tol", theory_tol, "solver tolerance (default 1e-10 exact, 1e-8 tables)")
      ->check(CLI::PositiveNumber);
  add_output_flags(theory, out_flags);

  auto* branch = app.add_subcommand("branch", "estimate survival of the multi-type branching process");
  std::uint64_t branch_k = 1, reps = 10'000, branch_seed = 1;
  double branch_c = 0.0;
  bool p0 = false;
  std::optional<double> branch_p;
  std::string branch_dist;
  // Extinction after 1e4 particles is negligible for the laws here; the
  // ambiguous fraction in JSON output reports any censoring.
  pg::branching::Caps caps{10'000, 10'000};
  branch->add_option("--k", branch_k, "ancestor type (cluster size)")->capture_default_str()->check(CLI::PositiveNumber);
  branch->add_option("--c", branch_c, "long-range intensity")->required()->check(CLI::NonNegativeNumber);
  branch->add_flag("--p0", p0, "point mass at 1 (p = 0)");
  branch->add_option("--p", branch_p, "exact one-dimensional law at bond probability p")->check(CLI::Range(0.0, 1.0));
  branch->add_option("--dist", branch_dist, "cluster-size law as CSV (k,probability)")->check(CLI::ExistingFile);
  branch->add_option("--reps", reps, "replicates, at least 1000")->capture_default_str();
  branch->add_option("--seed", branch_seed, "base seed")->capture_default_str();
  branch->add_option("--max-particles", caps.max_particles, "population cap counted as survival")
      ->capture_default_str();
  branch->add_option("--max-generations", caps.max_generations, "generation cap counted as survival")
      ->capture_default_str();
  add_output_flags(branch, out_flags);

  auto* experiment = app.add_subcommand("experiment", "run a configured sweep and write summary CSVs");
  auto* check = app.add_subcommand("check", "run a config's embedded acceptance checks (experiment --check)");
  std::string config_path, exp_output;
  bool check_mode = false;
  std::optional<int> threads;
  for (auto* cmd : {experiment, check}) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd->add_option("--threads", threads, "replicate threads (default: PERCOGRAPH_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--output", exp_output,
                    "path prefix for <prefix>_summary.csv and <prefix>_per_k.csv (overrides config)");
  }
  experiment->add_flag("--check", check_mode, "evaluate embedded checks; exit 1 on failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*percolate) return run_percolate(lattice_flags, out_flags);
    if (*merge) return run_merge(lattice_flags, merge_c, long_seed.value_or(lattice_flags.seed), out_flags);
    if (*theory) return run_theory(d1_exact, theory_p, theory_dist, theory_d, theory_c, theory_tol, out_flags);
    if (*branch)
      return run_branch(branch_k, branch_c, p0, branch_p, branch_dist, reps, branch_seed, caps, out_flags);
    if (*experiment) return run_experiment(config_path, check_mode, threads, exp_output);
    if (*check) return run_experiment(config_path, true, threads, exp_output);
  } catch (const pg::DomainError& e) {
    std::cerr << "percograph: numeric domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const pg::experiments::ConfigError& e) {
    std::cerr << "percograph: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "percograph: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "percograph: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
