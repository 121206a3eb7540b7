#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "percograph/lattice.hpp"

namespace percograph::merged {

using lattice::PercolationConfig;
using lattice::Vertex;

using Edge = std::pair<Vertex, Vertex>;  // first < second

/// Percolation clusters plus an Erdos-Renyi overlay with edge probability c/|B(N)|.
/// Long edges are kept separately from lattice bonds; a pair may carry both.
class MergedGraph {
 public:
  MergedGraph(PercolationConfig base, double c, std::uint64_t seed, std::vector<Edge> long_edges);

  const PercolationConfig& base() const { return base_; }
  double c() const { return c_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Edge>& long_edges() const { return long_edges_; }
  const std::vector<Vertex>& labels() const { return labels_; }
  /// Sorted descending.
  const std::vector<std::uint64_t>& component_sizes() const { return component_sizes_; }
  std::uint64_t C1() const { return component_sizes_.empty() ? 0 : component_sizes_[0]; }
  std::uint64_t C2() const { return component_sizes_.size() < 2 ? 0 : component_sizes_[1]; }

 private:
  PercolationConfig base_;
  double c_;
  std::uint64_t seed_;
  std::vector<Edge> long_edges_;
  std::vector<Vertex> labels_;
  std::vector<std::uint64_t> component_sizes_;
};

/// Samples every unordered pair independently with probability c/n: the edge
/// count is drawn from Binomial(n(n-1)/2, c/n), then that many distinct pairs
/// are drawn uniformly. Components continue the base union-find.
MergedGraph overlay_long_range(const PercolationConfig& base, double c, std::uint64_t seed);

/// Deterministic merge for an explicit long-edge list (used by the sampler and tests).
MergedGraph merge_with_edges(const PercolationConfig& base, double c, std::uint64_t seed,
                             std::vector<Edge> long_edges);

struct ComponentSummary {
  std::vector<std::uint64_t> sizes;  // descending
  std::uint64_t C1 = 0;
  std::uint64_t C2 = 0;
  std::uint64_t count = 0;
};

ComponentSummary components(const MergedGraph& merged);

/// Quotient of the long-range edges by the base clusters: one vertex per cluster,
/// typed by its size; intra-cluster long edges are dropped.
class MacroGraph {
 public:
  MacroGraph(std::vector<std::uint64_t> types, std::vector<Edge> adjacency);

  const std::vector<std::uint64_t>& types() const { return types_; }
  /// Sorted, unique pairs (i < j) of macro-vertex indices.
  const std::vector<Edge>& adjacency() const { return adjacency_; }
  /// Component sizes counted in macro-vertices and in lattice vertices; both
  /// sorted descending.
  const std::vector<std::uint64_t>& component_macro_sizes() const { return macro_sizes_; }
  const std::vector<std::uint64_t>& component_vertex_sizes() const { return vertex_sizes_; }
  std::uint64_t n_components() const { return vertex_sizes_.size(); }

 private:
  std::vector<std::uint64_t> types_;
  std::vector<Edge> adjacency_;
  std::vector<std::uint64_t> macro_sizes_;
  std::vector<std::uint64_t> vertex_sizes_;
};

MacroGraph build_macro_graph(const MergedGraph& merged);

struct Correspondence {
  bool ok = false;
  std::string report;  // empty when ok
};

/// Component counts and lattice-vertex size multisets must agree exactly.
Correspondence verify_correspondence(const MergedGraph& merged, const MacroGraph& macro);

std::string summary_csv_header();
/// Row (seed, d, N, p, c, K_N, C1, C2, n_long_edges).
std::string summary_csv_row(const MergedGraph& merged);

}  // namespace percograph::merged
