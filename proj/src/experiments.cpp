#include "percograph/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "percograph/errors.hpp"
#include "percograph/format.hpp"
#include "percograph/merged_graph.hpp"
#include "percograph/rng.hpp"
#include "percograph/theory.hpp"

namespace percograph::experiments {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEnvelopeEps = 0.5;
constexpr double kEnvelopeNu = 3.0;

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t t = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(t);
  for (std::size_t w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += t) fn(i);
    });
}

// Seeds depend on the cell's parameters, not its position in a grid.
std::uint64_t cell_key(int d, int N, double p, double c) {
  return mix_seed({static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(N),
                   std::bit_cast<std::uint64_t>(p), std::bit_cast<std::uint64_t>(c)});
}

bool same(double a, double b) { return std::abs(a - b) < 1e-12; }

double law_tolerance(const ExperimentConfig& config, const ClusterSizeDistribution& law) {
  return law.kind() == dist::Kind::kExactD1 ? config.tol : std::max(config.tol, 1e-8);
}

struct Replicate {
  bool ok = false;
  double c1 = 0, c2 = 0, kn = 0, c1_log = 0;
  std::vector<double> nk_over_kn;
};

template <class T>
T field(const nlohmann::json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + name + "': " + e.what());
  }
}

template <class T>
std::vector<T> grid(const nlohmann::json& j, const char* name, std::vector<T> fallback) {
  if (!j.contains(name)) return fallback;
  const auto& v = j.at(name);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + name + "': " + e.what());
  }
}

const CellSummary* find_cell(const SweepResult& s, double p, double c) {
  for (const auto& cell : s.cells)
    if (same(cell.p, p) && same(cell.c, c)) return &cell;
  return nullptr;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "d", "N", "boundary", "p", "c", "replicates", "base_seed", "k_max", "tol", "z",
      "threads", "estimation_N", "estimation_replicates", "output", "checks"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown field '" + key + "'");

  ExperimentConfig c;
  c.d = field(j, "d", c.d);
  c.N = grid<int>(j, "N", c.N);
  c.boundary = lattice::boundary_from_string(field<std::string>(j, "boundary", "torus"));
  c.p_grid = grid<double>(j, "p", c.p_grid);
  c.c_grid = grid<double>(j, "c", c.c_grid);
  const auto reps = field<long long>(j, "replicates", static_cast<long long>(c.replicates));
  if (reps < 1) throw ConfigError("field 'replicates': must be >= 1");
  c.replicates = static_cast<std::uint64_t>(reps);
  c.base_seed = field(j, "base_seed", c.base_seed);
  c.k_max = field(j, "k_max", c.k_max);
  c.tol = field(j, "tol", c.tol);
  c.z = field(j, "z", c.z);
  c.threads = field(j, "threads", c.threads);
  c.estimation_N = field(j, "estimation_N", c.estimation_N);
  c.estimation_replicates = field(j, "estimation_replicates", c.estimation_replicates);
  c.output = field<std::string>(j, "output", "");

  if (c.d < 1) throw ConfigError("field 'd': must be >= 1");
  if (c.N.empty()) throw ConfigError("field 'N': grid is empty");
  for (int n : c.N)
    if (n < 1) throw ConfigError("field 'N': radius must be >= 1");
  if (c.p_grid.empty()) throw ConfigError("field 'p': grid is empty");
  if (c.c_grid.empty()) throw ConfigError("field 'c': grid is empty");
  for (double p : c.p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("field 'p': probabilities must lie in [0,1]");
  for (double x : c.c_grid)
    if (!(x >= 0.0)) throw ConfigError("field 'c': intensities must be >= 0");
  if (!std::is_sorted(c.p_grid.begin(), c.p_grid.end()))
    throw ConfigError("field 'p': grid must be sorted");
  if (!std::is_sorted(c.c_grid.begin(), c.c_grid.end()))
    throw ConfigError("field 'c': grid must be sorted");
  if (!(c.tol > 0.0)) throw ConfigError("field 'tol': must be > 0");
  if (c.estimation_N < 1 || c.estimation_replicates < 1)
    throw ConfigError("field 'estimation_N'/'estimation_replicates': must be >= 1");

  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) throw ConfigError("field 'checks': must be an array");
    static const std::vector<std::string> kinds = {"beta_match",  "kappa_match",
                                                   "giant_below", "giant_above",
                                                   "transition_localized", "subcritical_bound"};
    for (const auto& cj : j.at("checks")) {
      CheckSpec s;
      s.kind = field<std::string>(cj, "kind", "");
      if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end())
        throw ConfigError("field 'checks': unknown check kind '" + s.kind + "'");
      s.p = field(cj, "p", 0.0);
      s.c = field(cj, "c", 0.0);
      s.tol = field(cj, "tol", 0.0);
      s.threshold = field(cj, "threshold", 0.0);
      c.checks.push_back(s);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

Stat summarize(const std::vector<double>& xs, double z) {
  Stat s;
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) s.mean += x;
  s.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  s.ci_half = z * s.std / std::sqrt(n);
  return s;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return kNaN;
  std::sort(xs.begin(), xs.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
  return xs[std::clamp<std::size_t>(rank, 1, xs.size()) - 1];
}

ClusterSizeDistribution estimate_cluster_law(const ExperimentConfig& config, double p) {
  const auto geom = lattice::build_geometry(config.d, config.estimation_N, config.boundary);
  const std::uint64_t key =
      mix_seed({config.base_seed, 0x4c4157ULL, cell_key(config.d, config.estimation_N, p, 0.0)});
  std::vector<lattice::Census> censuses(config.estimation_replicates);
  parallel_for(censuses.size(), config.threads, [&](std::size_t r) {
    censuses[r] = lattice::cluster_census(lattice::sample_percolation(geom, p, mix_seed({key, r})));
  });
  return ClusterSizeDistribution::from_census(censuses, config.boundary);
}

ClusterSizeDistribution theory_distribution(const ExperimentConfig& config, double p) {
  if (config.d == 1) return ClusterSizeDistribution::exact_d1(p);
  return estimate_cluster_law(config, p);
}

CellSummary run_cell(const ExperimentConfig& config, std::size_t cell, int N, double p, double c) {
  return run_cell(config, cell, N, p, c, theory_distribution(config, p));
}

CellSummary run_cell(const ExperimentConfig& config, std::size_t cell, int N, double p, double c,
                     const ClusterSizeDistribution& law) {
  const auto geom = lattice::build_geometry(config.d, N, config.boundary);
  const double n = static_cast<double>(geom.n_vertices());
  const std::uint64_t key = cell_key(config.d, N, p, c);
  std::vector<Replicate> reps(config.replicates);
  parallel_for(reps.size(), config.threads, [&](std::size_t r) {
    Replicate& out = reps[r];
    try {
      const std::uint64_t seed = mix_seed({config.base_seed, key, r});
      const auto base = lattice::sample_percolation(geom, p, mix_seed({seed, 1}));
      const auto merged = merged::overlay_long_range(base, c, mix_seed({seed, 2}));
      out.c1 = static_cast<double>(merged.C1()) / n;
      out.c2 = static_cast<double>(merged.C2()) / n;
      out.kn = static_cast<double>(base.n_clusters()) / n;
      out.c1_log = static_cast<double>(merged.C1()) / std::log(n);
      const auto census = lattice::cluster_census(base);
      out.nk_over_kn.assign(config.k_max, 0.0);
      for (const auto& [k, count] : census.counts)
        if (k <= config.k_max)
          out.nk_over_kn[k - 1] =
              static_cast<double>(count) / static_cast<double>(census.n_clusters);
      out.ok = true;
    } catch (const std::exception&) {
      out.ok = false;
    }
  });

  CellSummary s;
  s.cell = cell;
  s.d = config.d;
  s.N = N;
  s.boundary = config.boundary;
  s.p = p;
  s.c = c;
  s.replicates = config.replicates;
  s.n_vertices = geom.n_vertices();
  std::vector<double> c2, kn;
  std::vector<std::vector<double>> nk(config.k_max);
  for (const auto& r : reps) {
    if (!r.ok) {
      ++s.failed;
      continue;
    }
    s.c1_frac_samples.push_back(r.c1);
    s.c1_log_samples.push_back(r.c1_log);
    c2.push_back(r.c2);
    kn.push_back(r.kn);
    for (std::uint64_t k = 0; k < config.k_max; ++k) nk[k].push_back(r.nk_over_kn[k]);
  }
  if (10 * s.failed > s.replicates) {
    std::ostringstream msg;
    msg << "cell (N=" << N << ", p=" << p << ", c=" << c << ") failed: " << s.failed << " of "
        << s.replicates << " replicates errored";
    throw std::runtime_error(msg.str());
  }
  s.c1_frac = summarize(s.c1_frac_samples, config.z);
  s.c1_log = summarize(s.c1_log_samples, config.z);
  s.c2_frac = summarize(c2, config.z);
  s.kn_frac = summarize(kn, config.z);
  s.c1_log_p95 = quantile(s.c1_log_samples, 0.95);

  const double tol = law_tolerance(config, law);
  const auto measure = dist::type_measure(law);
  for (std::uint64_t k = 1; k <= config.k_max; ++k) {
    const Stat st = summarize(nk[k - 1], config.z);
    PerK row;
    row.k = k;
    row.mean = st.mean;
    row.se = st.std / std::sqrt(static_cast<double>(nk[k - 1].size()));
    row.mu = measure.mu_at(k);
    s.per_k.push_back(row);
  }
  s.kappa = measure.kappa;
  s.c_cr = theory::c_critical(law);
  s.beta = theory::solve_beta(law, c, tol);
  s.alpha = kNaN;
  if (c > 0.0 && theory::classify(law, c) == theory::Phase::kSubcritical)
    s.alpha = theory::solve_alpha(law, c, tol).alpha;
  return s;
}

SweepResult sweep(const ExperimentConfig& config) {
  SweepResult out;
  const int N = config.N.front();
  std::size_t cell = 0;
  for (double p : config.p_grid) {
    const auto law = theory_distribution(config, p);
    for (double c : config.c_grid) out.cells.push_back(run_cell(config, cell++, N, p, c, law));
  }

  auto max_step = [](const std::vector<double>& g) {
    double step = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) step = std::max(step, g[i] - g[i - 1]);
    return step;
  };
  auto localize = [](Transition& t) {
    t.localized = std::isfinite(t.theory) && std::isfinite(t.crossing) &&
                  std::abs(t.crossing - t.theory) <= t.grid_step + 1e-12;
  };
  const std::size_t nc = config.c_grid.size();
  if (nc > 1) {
    for (std::size_t i = 0; i < config.p_grid.size(); ++i) {
      Transition t;
      t.fixed = config.p_grid[i];
      t.along_c = true;
      t.theory = out.cells[i * nc].c_cr;
      t.crossing = kNaN;
      t.grid_step = max_step(config.c_grid);
      for (std::size_t j = 0; j < nc; ++j)
        if (out.cells[i * nc + j].c1_frac.mean > kGiantThreshold) {
          t.crossing = config.c_grid[j];
          break;
        }
      localize(t);
      out.transitions.push_back(t);
    }
  }
  if (config.p_grid.size() > 1) {
    for (std::size_t j = 0; j < nc; ++j) {
      Transition t;
      t.fixed = config.c_grid[j];
      t.along_c = false;
      const double c = config.c_grid[j];
      t.theory = config.d == 1 && c > 0.0 && c < 1.0 ? theory::p_critical_d1(c) : kNaN;
      t.crossing = kNaN;
      t.grid_step = max_step(config.p_grid);
      for (std::size_t i = 0; i < config.p_grid.size(); ++i)
        if (out.cells[i * nc + j].c1_frac.mean > kGiantThreshold) {
          t.crossing = config.p_grid[i];
          break;
        }
      localize(t);
      out.transitions.push_back(t);
    }
  }
  return out;
}

ScalingResult subcritical_scaling(const ExperimentConfig& config, double p, double c) {
  const auto law = theory_distribution(config, p);
  if (theory::classify(law, c) != theory::Phase::kSubcritical)
    throw DomainError("subcritical_scaling requires c < c_cr(p)");
  const double alpha = c > 0.0 ? theory::solve_alpha(law, c, law_tolerance(config, law)).alpha : kNaN;
  ScalingResult out;
  out.within_bound = true;
  out.non_increasing = true;
  for (std::size_t i = 0; i < config.N.size(); ++i) {
    const auto cell = run_cell(config, i, config.N[i], p, c, law);
    ScalingRow row;
    row.N = config.N[i];
    row.n_vertices = cell.n_vertices;
    row.c1_log_p95 = cell.c1_log_p95;
    row.c1_log_mean = cell.c1_log.mean;
    row.alpha = alpha;
    row.bound = 1.5 * alpha;
    if (std::isfinite(row.bound) && !(row.c1_log_p95 <= row.bound)) out.within_bound = false;
    if (!out.rows.empty() && row.c1_log_p95 > out.rows.back().c1_log_p95) out.non_increasing = false;
    out.rows.push_back(row);
  }
  return out;
}

std::vector<ConcentrationRow> concentration_check(const ExperimentConfig& config, double p,
                                                  double c) {
  const auto law = theory_distribution(config, p);
  if (theory::classify(law, c) == theory::Phase::kCritical)
    throw DomainError("concentration_check needs a sub- or supercritical cell");
  const auto cell = run_cell(config, 0, config.N.front(), p, c, law);
  const auto measure = dist::type_measure(law);
  std::vector<ConcentrationRow> rows;
  for (const auto& pk : cell.per_k) {
    ConcentrationRow r;
    r.k = pk.k;
    r.mean = pk.mean;
    r.se = pk.se;
    r.mu = pk.mu;
    const double dev = std::abs(r.mean - r.mu);
    r.within_3se = dev <= 3.0 * r.se || (r.se == 0.0 && dev < 1e-12);
    r.envelope = kEnvelopeEps * std::pow(static_cast<double>(r.k), kEnvelopeNu) *
                 measure.mu_tilde_at(r.k);
    r.envelope_violated = dev > r.envelope;
    rows.push_back(r);
  }
  return rows;
}

std::vector<CheckResult> evaluate_checks(const ExperimentConfig& config, const SweepResult& s) {
  std::vector<CheckResult> out;
  for (const auto& want : config.checks) {
    CheckResult r;
    std::ostringstream name, detail;
    name << want.kind << "(p=" << format_number(want.p) << ",c=" << format_number(want.c) << ")";
    r.name = name.str();
    if (want.kind == "transition_localized") {
      r.pass = false;
      detail << "no c-sweep transition for this p";
      for (const auto& t : s.transitions) {
        if (t.along_c && same(t.fixed, want.p)) {
          r.pass = t.localized;
          detail.str("");
          detail << "crossing " << format_number(t.crossing) << " vs c_cr "
                 << format_number(t.theory) << " (step " << format_number(t.grid_step) << ")";
        }
      }
    } else if (want.kind == "subcritical_bound") {
      const auto scaling = subcritical_scaling(config, want.p, want.c);
      r.pass = scaling.within_bound;
      for (const auto& row : scaling.rows)
        detail << "N=" << row.N << " p95=" << format_number(row.c1_log_p95) << " bound="
               << format_number(row.bound) << "; ";
    } else {
      const CellSummary* cell = find_cell(s, want.p, want.c);
      if (cell == nullptr) {
        r.pass = false;
        detail << "no cell with these parameters in the sweep";
      } else if (want.kind == "beta_match") {
        const double err = std::abs(cell->c1_frac.mean - cell->beta);
        r.pass = err <= want.tol;
        detail << "mean C1/n " << format_number(cell->c1_frac.mean) << " vs beta "
               << format_number(cell->beta) << " (tol " << format_number(want.tol) << ")";
      } else if (want.kind == "kappa_match") {
        const double err = std::abs(cell->kn_frac.mean - cell->kappa);
        r.pass = err <= want.tol;
        detail << "mean K_N/n " << format_number(cell->kn_frac.mean) << " vs kappa "
               << format_number(cell->kappa) << " (tol " << format_number(want.tol) << ")";
      } else if (want.kind == "giant_below") {
        r.pass = cell->c1_frac.mean < want.threshold;
        detail << "mean C1/n " << format_number(cell->c1_frac.mean) << " < "
               << format_number(want.threshold);
      } else if (want.kind == "giant_above") {
        r.pass = cell->c1_frac.mean > want.threshold;
        detail << "mean C1/n " << format_number(cell->c1_frac.mean) << " > "
               << format_number(want.threshold);
      }
    }
    r.detail = detail.str();
    out.push_back(r);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells,
                       const std::string& invocation) {
  out << "# percograph summary schema v" << kCsvSchemaVersion << "; " << invocation << "\n";
  out << "cell,d,N,boundary,p,c,replicates,failed,C1_frac_mean,C1_frac_std,C1_frac_ci,"
         "C2_frac_mean,C2_frac_std,KN_frac_mean,KN_frac_std,KN_frac_ci,C1_log_mean,C1_log_p95,"
         "c_cr,beta,alpha,kappa\n";
  for (const auto& s : cells) {
    out << s.cell << ',' << s.d << ',' << s.N << ',' << lattice::to_string(s.boundary) << ','
        << format_number(s.p) << ',' << format_number(s.c) << ',' << s.replicates << ','
        << s.failed << ',' << format_number(s.c1_frac.mean) << ',' << format_number(s.c1_frac.std)
        << ',' << format_number(s.c1_frac.ci_half) << ',' << format_number(s.c2_frac.mean) << ','
        << format_number(s.c2_frac.std) << ',' << format_number(s.kn_frac.mean) << ','
        << format_number(s.kn_frac.std) << ',' << format_number(s.kn_frac.ci_half) << ','
        << format_number(s.c1_log.mean) << ',' << format_number(s.c1_log_p95) << ','
        << format_number(s.c_cr) << ',' << format_number(s.beta) << ','
        << format_number(s.alpha) << ',' << format_number(s.kappa) << '\n';
  }
}

void write_per_k_csv(std::ostream& out, const std::vector<CellSummary>& cells,
                     const std::string& invocation) {
  out << "# percograph per-k schema v" << kCsvSchemaVersion << "; " << invocation << "\n";
  out << "cell,p,c,k,NkKN_mean,NkKN_se,mu_k\n";
  for (const auto& s : cells)
    for (const auto& r : s.per_k)
      out << s.cell << ',' << format_number(s.p) << ',' << format_number(s.c) << ',' << r.k << ','
          << format_number(r.mean) << ',' << format_number(r.se) << ',' << format_number(r.mu)
          << '\n';
}

int resolve_threads(std::optional<int> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("PERCOGRAPH_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

}  // namespace percograph::experiments
