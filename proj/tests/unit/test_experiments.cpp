#include <cmath>
#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "percograph/errors.hpp"
#include "percograph/experiments.hpp"
#include "percograph/theory.hpp"

using namespace percograph;
using namespace percograph::experiments;
using nlohmann::json;

namespace {

ExperimentConfig d1_config(int N, std::uint64_t reps) {
  ExperimentConfig c;
  c.d = 1;
  c.N = {N};
  c.replicates = reps;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(json::parse(R"({
    "d": 1, "N": 1000, "p": [0.1, 0.5], "c": 0.3, "replicates": 4, "base_seed": 9,
    "boundary": "free",
    "checks": [{"kind": "beta_match", "p": 0.1, "c": 0.3, "tol": 0.01}]
  })"));
  CHECK(c.N == std::vector<int>{1000});
  CHECK(c.p_grid == std::vector<double>{0.1, 0.5});
  CHECK(c.c_grid == std::vector<double>{0.3});
  CHECK(c.replicates == 4);
  CHECK(c.base_seed == 9);
  CHECK(c.boundary == Boundary::kFree);
  REQUIRE(c.checks.size() == 1);
  CHECK(c.checks[0].kind == "beta_match");
  CHECK(c.checks[0].tol == 0.01);

  const auto defaults = parse_config(json::object());
  CHECK(defaults.replicates == 20);
  CHECK(defaults.boundary == Boundary::kTorus);
}

TEST_CASE("config errors name the field") {
  auto message = [](const char* text) -> std::string {
    try {
      parse_config(json::parse(text));
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(R"({"replicates": 0})").find("replicates") != std::string::npos);
  CHECK(message(R"({"replicas": 3})").find("replicas") != std::string::npos);
  CHECK(message(R"({"p": [0.5, 0.1]})").find("'p'") != std::string::npos);
  CHECK(message(R"({"p": 1.5})").find("'p'") != std::string::npos);
  CHECK(message(R"({"c": []})").find("'c'") != std::string::npos);
  CHECK(message(R"({"c": -1})").find("'c'") != std::string::npos);
  CHECK(message(R"({"N": "big"})").find("'N'") != std::string::npos);
  CHECK(message(R"({"checks": [{"kind": "nope"}]})").find("nope") != std::string::npos);
  CHECK(message("[1, 2]") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("summary statistics") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0}, 2.0);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.ci_half == doctest::Approx(2.0 * std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(summarize({7.0}, 1.96).ci_half == 0.0);
  CHECK(quantile({5, 1, 4, 2, 3}, 0.95) == 5);
  CHECK(quantile({5, 1, 4, 2, 3}, 0.5) == 3);
  CHECK(quantile({5, 1, 4, 2, 3}, 0.0) == 1);
  CHECK(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("isolated vertices when p = 0 and c = 0") {
  const auto cell = run_cell(d1_config(500, 5), 0, 500, 0.0, 0.0);
  CHECK(cell.failed == 0);
  for (double x : cell.c1_frac_samples) CHECK(x * 1001.0 == doctest::Approx(1.0));
  CHECK(cell.kn_frac.mean == 1.0);
  CHECK(cell.per_k[0].mean == 1.0);
  CHECK(cell.per_k[0].mu == 1.0);
  CHECK(cell.beta == 0.0);
  CHECK(std::isnan(cell.alpha));
}

TEST_CASE("cluster density cell") {
  const auto cell = run_cell(d1_config(100000, 20), 0, 100000, 0.3, 0.2);
  CHECK(std::abs(cell.kn_frac.mean - 0.7) <= 0.005);
  CHECK(cell.kappa == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(cell.c_cr == doctest::Approx(0.7 / 1.3).epsilon(1e-12));
  CHECK(cell.beta == 0.0);
  CHECK(cell.alpha > 0.0);
}

TEST_CASE("giant fraction cell") {
  const auto cell = run_cell(d1_config(100000, 20), 0, 100000, 0.3, 1.0);
  const double beta = theory::solve_beta(dist::ClusterSizeDistribution::exact_d1(0.3), 1.0);
  CHECK(cell.beta == doctest::Approx(beta).epsilon(1e-12));
  CHECK(std::abs(cell.c1_frac.mean - beta) <= 0.01);
  CHECK(cell.c2_frac.mean < 0.02);
}

TEST_CASE("sweep localizes the transition in c") {
  auto config = d1_config(100000, 6);
  config.p_grid = {0.5};
  config.c_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  config.checks = {{"giant_below", 0.5, 0.3, 0.0, 0.02},
                   {"giant_above", 0.5, 0.5, 0.0, 0.1},
                   {"transition_localized", 0.5, 0.0, 0.0, 0.0},
                   {"beta_match", 0.5, 0.9, 0.02, 0.0},
                   {"giant_above", 0.7, 0.5, 0.0, 0.1}};
  const auto s = sweep(config);
  REQUIRE(s.cells.size() == 9);
  for (const auto& cell : s.cells) {
    CAPTURE(cell.c);
    if (cell.c <= 0.3) CHECK(cell.c1_frac.mean < 0.02);
    if (cell.c >= 0.5) CHECK(cell.c1_frac.mean > 0.1);
    CHECK(cell.c_cr == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  REQUIRE(s.transitions.size() == 1);
  CHECK(s.transitions[0].along_c);
  CHECK(s.transitions[0].localized);
  CHECK(std::abs(s.transitions[0].crossing - 1.0 / 3.0) <= 0.1 + 1e-12);

  const auto results = evaluate_checks(config, s);
  REQUIRE(results.size() == 5);
  for (std::size_t i = 0; i < 4; ++i) {
    CAPTURE(results[i].detail);
    CHECK(results[i].pass);
  }
  // No such cell in the sweep.
  CHECK_FALSE(results[4].pass);
}

TEST_CASE("classical transition at p = 0") {
  auto config = d1_config(50000, 5);
  config.p_grid = {0.0};
  config.c_grid = {0.6, 0.8, 1.0, 1.2, 1.4};
  const auto s = sweep(config);
  REQUIRE(s.transitions.size() == 1);
  CHECK(s.transitions[0].theory == doctest::Approx(1.0));
  CHECK(s.transitions[0].localized);
}

TEST_CASE("dual sweep in p at fixed c") {
  auto config = d1_config(100000, 5);
  config.p_grid = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
  config.c_grid = {0.6};
  const auto s = sweep(config);
  REQUIRE(s.transitions.size() == 1);
  const auto& t = s.transitions[0];
  CHECK_FALSE(t.along_c);
  CHECK(t.theory == doctest::Approx(0.25));
  CHECK(t.localized);
}

TEST_CASE("subcritical scaling is bounded by 1.5 alpha") {
  auto config = d1_config(1000, 30);
  config.N = {500, 5000, 50000};
  const auto r = subcritical_scaling(config, 0.0, 0.5);
  REQUIRE(r.rows.size() == 3);
  const double alpha = 1.0 / (0.5 - 1.0 + std::log(2.0));
  for (const auto& row : r.rows) {
    CHECK(row.alpha == doctest::Approx(alpha).epsilon(1e-9));
    CHECK(row.bound == doctest::Approx(1.5 * alpha).epsilon(1e-9));
  }
  CHECK(r.within_bound);

  // c = 0 has no alpha; boundedness is still reported.
  const auto pure = subcritical_scaling(config, 0.3, 0.0);
  for (const auto& row : pure.rows) {
    CHECK(std::isnan(row.alpha));
    CHECK(row.c1_log_p95 < 5.0);
  }
  CHECK_THROWS_AS(subcritical_scaling(config, 0.5, 0.5), DomainError);
}

TEST_CASE("cluster type frequencies concentrate") {
  // Enough replicates that the per-k standard errors are themselves reliable.
  auto config = d1_config(100000, 40);
  const auto rows = concentration_check(config, 0.5, 0.2);
  REQUIRE(rows.size() == 20);
  CHECK(rows[0].mu == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(rows[0].mean - 0.5) < 3.0 * rows[0].se);
  for (const auto& r : rows) {
    CAPTURE(r.k);
    CHECK(r.within_3se);
    CHECK_FALSE(r.envelope_violated);
  }

  const auto trivial = concentration_check(config, 0.0, 0.2);
  CHECK(trivial[0].mean == 1.0);
  CHECK(trivial[0].within_3se);
  for (std::size_t k = 1; k < trivial.size(); ++k) CHECK(trivial[k].mean == 0.0);
}

TEST_CASE("output is deterministic and independent of thread count") {
  auto config = d1_config(2000, 8);
  config.p_grid = {0.2, 0.4};
  config.c_grid = {0.5, 1.5};
  auto render = [&](int threads) {
    config.threads = threads;
    const auto s = sweep(config);
    std::ostringstream out;
    write_summary_csv(out, s.cells, "test");
    write_per_k_csv(out, s.cells, "test");
    return out.str();
  };
  const auto a = render(1);
  CHECK(a == render(1));
  CHECK(a == render(3));
  CHECK(a.rfind("# percograph summary schema v1; test\n", 0) == 0);

  // Adding a grid value leaves existing cells untouched.
  config.threads = 1;
  const auto before = sweep(config);
  config.c_grid = {0.5, 1.0, 1.5};
  const auto after = sweep(config);
  CHECK(before.cells[0].c1_frac_samples == after.cells[0].c1_frac_samples);
  CHECK(before.cells[1].c1_frac_samples == after.cells[2].c1_frac_samples);
}

TEST_CASE("confidence intervals cover the cluster density") {
  int covered = 0;
  for (std::uint64_t meta = 0; meta < 20; ++meta) {
    auto config = d1_config(10000, 20);
    config.base_seed = 1000 + meta;
    const auto cell = run_cell(config, 0, 10000, 0.5, 0.0);
    covered += std::abs(cell.kn_frac.mean - cell.kappa) <= cell.kn_frac.ci_half;
  }
  CHECK(covered >= 18);
}

TEST_CASE("two-dimensional plug-in law") {
  ExperimentConfig config;
  config.d = 2;
  config.estimation_N = 60;
  config.estimation_replicates = 5;
  const auto law = theory_distribution(config, 0.3);
  CHECK(law.kind() == dist::Kind::kEmpirical);
  CHECK(law.boundary() == Boundary::kTorus);
  // Neighbours give E|C| >= 1 + 4p; self-avoiding walks give E|C| <= 1 + 4p / (1 - 3p).
  CHECK(law.mean() > 1.0 + 4 * 0.3);
  CHECK(law.mean() < 1.0 + 4 * 0.3 / (1 - 3 * 0.3));
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(4) == 4);
  ::setenv("PERCOGRAPH_THREADS", "3", 1);
  CHECK(resolve_threads(std::nullopt) == 3);
  CHECK(resolve_threads(2) == 2);
  ::setenv("PERCOGRAPH_THREADS", "junk", 1);
  CHECK(resolve_threads(std::nullopt) == 1);
  ::unsetenv("PERCOGRAPH_THREADS");
  CHECK(resolve_threads(std::nullopt) == 1);
}
