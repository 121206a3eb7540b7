#include "percograph/merged_graph.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "percograph/format.hpp"
#include "percograph/rng.hpp"
#include "percograph/union_find.hpp"

namespace percograph::merged {
namespace {

std::vector<std::uint64_t> sizes_descending(const std::vector<Vertex>& labels, std::size_t count) {
  std::vector<std::uint64_t> sizes(count, 0);
  for (Vertex l : labels) ++sizes[l];
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

}  // namespace

MergedGraph::MergedGraph(PercolationConfig base, double c, std::uint64_t seed,
                         std::vector<Edge> long_edges)
    : base_(std::move(base)), c_(c), seed_(seed), long_edges_(std::move(long_edges)) {
  const std::size_t n = base_.geometry().n_vertices();
  UnionFind uf(n);
  // Every vertex joins the first vertex of its base cluster.
  std::vector<Vertex> first(base_.n_clusters(), ~Vertex{0});
  for (Vertex v = 0; v < n; ++v) {
    const Vertex l = base_.cluster_of(v);
    if (first[l] == ~Vertex{0})
      first[l] = v;
    else
      uf.unite(first[l], v);
  }
  for (const auto& [a, b] : long_edges_) uf.unite(a, b);
  labels_ = uf.dense_labels();
  component_sizes_ = sizes_descending(labels_, uf.components());
}

MergedGraph merge_with_edges(const PercolationConfig& base, double c, std::uint64_t seed,
                             std::vector<Edge> long_edges) {
  const std::uint64_t n = base.geometry().n_vertices();
  for (auto& e : long_edges) {
    if (e.first == e.second) throw std::invalid_argument("long-range edges must join distinct vertices");
    if (e.first >= n || e.second >= n) throw std::invalid_argument("long-range edge endpoint out of range");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  return MergedGraph(base, c, seed, std::move(long_edges));
}

MergedGraph overlay_long_range(const PercolationConfig& base, double c, std::uint64_t seed) {
  const std::uint64_t n = base.geometry().n_vertices();
  if (!(c >= 0.0)) throw std::invalid_argument("long-range intensity c must be >= 0");
  const double q = c / static_cast<double>(n);
  if (q > 1.0) throw std::invalid_argument("long-range edge probability c/|B(N)| exceeds 1");

  std::vector<Edge> edges;
  if (c > 0.0 && n >= 2) {
    Engine rng = make_engine({base.seed(), seed, 0x4c4f4e47ULL});
    const long long pairs = static_cast<long long>(n * (n - 1) / 2);
    std::binomial_distribution<long long> count_dist(pairs, q);
    const long long m = count_dist(rng);
    edges.reserve(static_cast<std::size_t>(m));
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(m) * 2);
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    while (static_cast<long long>(edges.size()) < m) {
      Vertex a = static_cast<Vertex>(pick(rng));
      Vertex b = static_cast<Vertex>(pick(rng));
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      const std::uint64_t key = static_cast<std::uint64_t>(a) * n + b;
      if (seen.insert(key).second) edges.emplace_back(a, b);
    }
  }
  return MergedGraph(base, c, seed, std::move(edges));
}

ComponentSummary components(const MergedGraph& merged) {
  ComponentSummary s;
  s.sizes = merged.component_sizes();
  s.C1 = merged.C1();
  s.C2 = merged.C2();
  s.count = s.sizes.size();
  return s;
}

MacroGraph::MacroGraph(std::vector<std::uint64_t> types, std::vector<Edge> adjacency)
    : types_(std::move(types)), adjacency_(std::move(adjacency)) {
  std::sort(adjacency_.begin(), adjacency_.end());
  adjacency_.erase(std::unique(adjacency_.begin(), adjacency_.end()), adjacency_.end());
  UnionFind uf(types_.size());
  for (const auto& [a, b] : adjacency_) {
    if (a >= types_.size() || b >= types_.size())
      throw std::invalid_argument("macro edge endpoint out of range");
    uf.unite(a, b);
  }
  const std::vector<Vertex> labels = uf.dense_labels();
  macro_sizes_.assign(uf.components(), 0);
  vertex_sizes_.assign(uf.components(), 0);
  for (std::size_t i = 0; i < types_.size(); ++i) {
    ++macro_sizes_[labels[i]];
    vertex_sizes_[labels[i]] += types_[i];
  }
  std::sort(macro_sizes_.begin(), macro_sizes_.end(), std::greater<>());
  std::sort(vertex_sizes_.begin(), vertex_sizes_.end(), std::greater<>());
}

MacroGraph build_macro_graph(const MergedGraph& merged) {
  const auto& base = merged.base();
  std::vector<std::uint64_t> types(base.cluster_sizes().begin(), base.cluster_sizes().end());
  std::vector<Edge> adjacency;
  adjacency.reserve(merged.long_edges().size());
  for (const auto& [a, b] : merged.long_edges()) {
    Vertex i = base.cluster_of(a);
    Vertex j = base.cluster_of(b);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    adjacency.emplace_back(i, j);
  }
  return MacroGraph(std::move(types), std::move(adjacency));
}

Correspondence verify_correspondence(const MergedGraph& merged, const MacroGraph& macro) {
  Correspondence out;
  const auto& a = merged.component_sizes();
  const auto& b = macro.component_vertex_sizes();
  std::ostringstream report;
  if (a.size() != b.size()) {
    report << "component count differs: merged " << a.size() << " vs macro " << b.size() << "; ";
  }
  const std::size_t m = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i] != b[i]) {
      report << "first size mismatch at rank " << i << ": merged " << a[i] << " vs macro " << b[i];
      break;
    }
  }
  out.report = report.str();
  out.ok = out.report.empty();
  return out;
}

std::string summary_csv_header() { return "seed,d,N,p,c,K_N,C1,C2,n_long_edges"; }

std::string summary_csv_row(const MergedGraph& merged) {
  const auto& g = merged.base().geometry();
  std::ostringstream out;
  out << merged.seed() << ',' << g.dimension() << ',' << g.radius() << ','
      << format_number(merged.base().p()) << ',' << format_number(merged.c()) << ','
      << merged.base().n_clusters() << ',' << merged.C1() << ',' << merged.C2() << ','
      << merged.long_edges().size();
  return out.str();
}

}  // namespace percograph::merged
