#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "percograph/cluster_distribution.hpp"
#include "percograph/merged_graph.hpp"
#include "percograph/theory.hpp"

using namespace percograph;
using namespace percograph::merged;
using lattice::Boundary;
using lattice::build_geometry;
using lattice::sample_percolation;

namespace {

// Classical Erdos-Renyi giant fraction by bisection on b = 1 - exp(-c b).
double er_giant(double c) {
  double lo = 1e-12, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid - (1.0 - std::exp(-c * mid)) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double log_binomial_pmf(double trials, double q, double k) {
  return std::lgamma(trials + 1) - std::lgamma(k + 1) - std::lgamma(trials - k + 1) +
         k * std::log(q) + (trials - k) * std::log1p(-q);
}

}  // namespace

TEST_CASE("c = 0 leaves the base partition unchanged") {
  const auto base = sample_percolation(build_geometry(2, 10, Boundary::kTorus), 0.4, 3);
  const auto m = overlay_long_range(base, 0.0, 9);
  CHECK(m.long_edges().empty());
  CHECK(std::equal(m.labels().begin(), m.labels().end(), base.labels().begin()));
  CHECK(m.component_sizes().size() == base.n_clusters());

  const auto macro = build_macro_graph(m);
  CHECK(macro.adjacency().empty());
  CHECK(macro.n_components() == base.n_clusters());
  CHECK(verify_correspondence(m, macro).ok);
}

TEST_CASE("component extremes") {
  const auto g = build_geometry(1, 50, Boundary::kFree);
  const auto isolated = components(overlay_long_range(sample_percolation(g, 0.0, 1), 0.0, 1));
  CHECK(isolated.C1 == 1);
  CHECK(isolated.count == g.n_vertices());
  CHECK(std::all_of(isolated.sizes.begin(), isolated.sizes.end(), [](auto s) { return s == 1; }));

  const auto full = components(overlay_long_range(sample_percolation(g, 1.0, 1), 0.7, 1));
  CHECK(full.count == 1);
  CHECK(full.C1 == g.n_vertices());
  CHECK(full.C2 == 0);
}

TEST_CASE("component invariants") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto base = sample_percolation(build_geometry(1 + seed % 2, 30, Boundary::kTorus),
                                         0.1 * static_cast<double>(seed % 5), seed);
    const auto m = overlay_long_range(base, 0.4 * static_cast<double>(seed), seed);
    const auto s = components(m);
    CHECK(std::accumulate(s.sizes.begin(), s.sizes.end(), std::uint64_t{0}) ==
          base.geometry().n_vertices());
    CHECK(std::is_sorted(s.sizes.rbegin(), s.sizes.rend()));
    CHECK(s.C1 == s.sizes.front());
    CHECK(s.C1 >= lattice::cluster_census(base).max_size);
    // Every base cluster lies inside one merged component.
    std::vector<std::int64_t> image(base.n_clusters(), -1);
    for (Vertex v = 0; v < base.geometry().n_vertices(); ++v) {
      auto& t = image[base.cluster_of(v)];
      if (t < 0) t = m.labels()[v];
      CHECK(t == static_cast<std::int64_t>(m.labels()[v]));
    }
    for (const auto& [a, b] : m.long_edges()) {
      CHECK(a < b);
      CHECK(m.labels()[a] == m.labels()[b]);
    }
  }
}

TEST_CASE("overlay rejects bad intensities") {
  const auto base = sample_percolation(build_geometry(1, 2, Boundary::kFree), 0.5, 1);
  CHECK_THROWS_AS(overlay_long_range(base, -1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(overlay_long_range(base, 6.0, 1), std::invalid_argument);
  CHECK_NOTHROW(overlay_long_range(base, 5.0, 1));
  CHECK_THROWS_AS(merge_with_edges(base, 0.0, 1, {{2, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(merge_with_edges(base, 0.0, 1, {{0, 5}}), std::invalid_argument);
}

TEST_CASE("long-edge count is binomial") {
  const auto base = sample_percolation(build_geometry(1, 50, Boundary::kTorus), 0.3, 1);
  const double n = 101.0, c = 2.0;
  const double trials = n * (n - 1) / 2, q = c / n;
  const int seeds = 200;
  std::vector<double> counts;
  for (int s = 0; s < seeds; ++s)
    counts.push_back(static_cast<double>(overlay_long_range(base, c, s).long_edges().size()));

  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / seeds;
  const double expected = trials * q;
  CHECK(expected == doctest::Approx((n - 1) * c / 2));
  CHECK(std::abs(mean - expected) < 3.0 * std::sqrt(expected * (1 - q) / seeds));

  // Chi-square over bins of roughly equal binomial mass.
  std::vector<double> edges{0};
  double acc = 0.0;
  for (int k = 0; k <= static_cast<int>(trials); ++k) {
    acc += std::exp(log_binomial_pmf(trials, q, k));
    if (acc >= 0.125 * static_cast<double>(edges.size())) edges.push_back(k + 1);
    if (edges.size() == 8) break;
  }
  std::vector<double> probs, observed(edges.size(), 0.0);
  for (std::size_t b = 0; b < edges.size(); ++b) {
    const int lo = static_cast<int>(edges[b]);
    const int hi = b + 1 < edges.size() ? static_cast<int>(edges[b + 1]) : static_cast<int>(trials) + 1;
    double mass = 0.0;
    for (int k = lo; k < hi; ++k) mass += std::exp(log_binomial_pmf(trials, q, k));
    probs.push_back(mass);
  }
  for (double x : counts) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    observed[it - edges.begin() - 1] += 1.0;
  }
  double chi2 = 0.0;
  for (std::size_t b = 0; b < probs.size(); ++b) {
    const double e = probs[b] * seeds;
    chi2 += (observed[b] - e) * (observed[b] - e) / e;
  }
  // 99th percentile of chi-square with 7 degrees of freedom.
  CHECK(chi2 < 18.475);
}

TEST_CASE("Erdos-Renyi giant component at p = 0") {
  const auto g = build_geometry(1, 50000, Boundary::kTorus);
  const auto base = sample_percolation(g, 0.0, 1);
  const double target = er_giant(2.0);
  CHECK(target == doctest::Approx(0.796812).epsilon(1e-6));
  CHECK(theory::solve_beta(dist::ClusterSizeDistribution::point_mass(), 2.0, 1e-13) ==
        doctest::Approx(target).epsilon(1e-10));
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s)
    sum += static_cast<double>(overlay_long_range(base, 2.0, s).C1()) /
           static_cast<double>(g.n_vertices());
  CHECK(std::abs(sum / 20 - target) <= 0.01);
}

TEST_CASE("supercritical giant matches beta and the runner-up is small") {
  const auto g = build_geometry(1, 50000, Boundary::kTorus);
  const double p = 0.3, c = 1.0;
  const double beta = theory::solve_beta(dist::ClusterSizeDistribution::exact_d1(p), c);
  std::vector<double> frac;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = overlay_long_range(sample_percolation(g, p, 100 + s), c, s);
    const double n = static_cast<double>(g.n_vertices());
    frac.push_back(static_cast<double>(m.C1()) / n);
    CHECK(static_cast<double>(m.C2()) / n < 0.02);
  }
  const double mean = std::accumulate(frac.begin(), frac.end(), 0.0) / frac.size();
  CHECK(std::abs(mean - beta) <= 0.01);
}

TEST_CASE("subcritical largest component stays below the alpha log n bound") {
  const auto g = build_geometry(1, 5000, Boundary::kTorus);
  const double p = 0.3, c = 0.2;
  const auto law = dist::ClusterSizeDistribution::exact_d1(p);
  const double alpha = theory::solve_alpha(law, c).alpha;
  const double bound = 1.5 * alpha * std::log(static_cast<double>(g.n_vertices()));
  int within = 0;
  const int runs = 40;
  for (int s = 0; s < runs; ++s)
    within += overlay_long_range(sample_percolation(g, p, s), c, s).C1() <= bound;
  CHECK(within >= 0.95 * runs);
}

TEST_CASE("overlay is deterministic") {
  const auto base = sample_percolation(build_geometry(2, 20, Boundary::kTorus), 0.3, 5);
  const auto a = overlay_long_range(base, 1.5, 8);
  const auto b = overlay_long_range(base, 1.5, 8);
  CHECK(a.long_edges() == b.long_edges());
  CHECK(a.component_sizes() == b.component_sizes());
  CHECK(overlay_long_range(base, 1.5, 9).long_edges() != a.long_edges());
  CHECK(summary_csv_row(a) == summary_csv_row(b));
}

TEST_CASE("macro graph quotient") {
  const auto g = build_geometry(1, 2, Boundary::kFree);
  const auto full = sample_percolation(g, 1.0, 1);
  const auto none = sample_percolation(g, 0.0, 1);
  const auto m = merge_with_edges(none, 1.0, 0, {{0, 4}, {4, 0}, {1, 3}});
  const auto macro = build_macro_graph(m);
  CHECK(macro.types().size() == 5);
  // Duplicate pair folded; orientation normalized.
  CHECK(macro.adjacency().size() == 2);
  CHECK(verify_correspondence(m, macro).ok);
  CHECK(m.C1() == 2);
  CHECK(m.component_sizes().size() == 3);

  const auto intra = merge_with_edges(full, 1.0, 0, {{0, 4}});
  const auto macro_intra = build_macro_graph(intra);
  CHECK(macro_intra.types() == std::vector<std::uint64_t>{5});
  CHECK(macro_intra.adjacency().empty());
}

TEST_CASE("correspondence holds and detects corruption") {
  int checked = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const int d = 1 + static_cast<int>(s % 2);
    const auto base = sample_percolation(build_geometry(d, d == 1 ? 400 : 15, Boundary::kTorus),
                                         0.05 * static_cast<double>(s % 8), s);
    const auto m = overlay_long_range(base, 0.3 + 0.1 * static_cast<double>(s % 10), s);
    const auto macro = build_macro_graph(m);
    const auto ok = verify_correspondence(m, macro);
    CHECK(ok.ok);
    CHECK(ok.report.empty());
    CHECK(macro.n_components() == m.component_sizes().size());
    CHECK(macro.component_vertex_sizes() == m.component_sizes());

    // Remove one macro edge that is a bridge: single edges whose endpoints
    // have no other neighbours always split a component.
    std::map<Vertex, int> degree;
    for (const auto& [a, b] : macro.adjacency()) ++degree[a], ++degree[b];
    std::vector<Edge> adj = macro.adjacency();
    const auto it = std::find_if(adj.begin(), adj.end(), [&](const Edge& e) {
      return degree[e.first] == 1 || degree[e.second] == 1;
    });
    if (it == adj.end()) continue;
    adj.erase(it);
    const MacroGraph broken(macro.types(), adj);
    const auto bad = verify_correspondence(m, broken);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.report.empty());
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("macro edge frequency follows 1 - (1 - c/n)^(xy)") {
  const auto g = build_geometry(1, 10000, Boundary::kTorus);
  const double n = static_cast<double>(g.n_vertices());
  const double c = 1.0;
  constexpr int kBin = 3;
  double pairs[kBin + 1][kBin + 1] = {};
  double hits[kBin + 1][kBin + 1] = {};
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = overlay_long_range(sample_percolation(g, 0.5, 50 + s), c, s);
    const auto macro = build_macro_graph(m);
    std::vector<double> count(kBin + 1, 0.0);
    for (auto t : macro.types())
      if (t <= kBin) count[t] += 1.0;
    for (int x = 1; x <= kBin; ++x)
      for (int y = x; y <= kBin; ++y)
        pairs[x][y] += x == y ? count[x] * (count[x] - 1) / 2 : count[x] * count[y];
    for (const auto& [a, b] : macro.adjacency()) {
      auto x = macro.types()[a], y = macro.types()[b];
      if (x > y) std::swap(x, y);
      if (y <= kBin) hits[x][y] += 1.0;
    }
  }
  for (int x = 1; x <= kBin; ++x)
    for (int y = x; y <= kBin; ++y) {
      const double q = 1.0 - std::pow(1.0 - c / n, x * y);
      const double expected = pairs[x][y] * q;
      const double se = std::sqrt(pairs[x][y] * q * (1 - q));
      CAPTURE(x);
      CAPTURE(y);
      CHECK(std::abs(hits[x][y] - expected) < 3.0 * se);
    }
}

TEST_CASE("summary CSV row") {
  const auto base = sample_percolation(build_geometry(1, 1000, Boundary::kTorus), 0.3, 7);
  const auto m = overlay_long_range(base, 1.0, 7);
  CHECK(summary_csv_header() == "seed,d,N,p,c,K_N,C1,C2,n_long_edges");
  const auto row = summary_csv_row(m);
  CHECK(row.rfind("7,1,1000,0.3,1,", 0) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 8);
}
