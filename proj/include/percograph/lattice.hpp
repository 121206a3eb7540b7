#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace percograph::lattice {

using Vertex = std::uint32_t;

enum class Boundary { kFree, kTorus };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// The box {-N,...,N}^d. Vertices are indexed in mixed radix with coordinate 0
/// varying fastest; edge (v, dir) joins v with its +1 neighbour along dir and has
/// key v*d + dir. Free boundaries simply lack the edges leaving the box.
class LatticeGeometry {
 public:
  // Flat per-vertex arrays are 32-bit indexed; larger boxes are rejected.
  static constexpr std::uint64_t kMaxVertices = std::uint64_t{1} << 31;

  LatticeGeometry(int d, int N, Boundary boundary);

  int dimension() const { return d_; }
  int radius() const { return N_; }
  int side() const { return side_; }
  Boundary boundary() const { return boundary_; }
  std::uint64_t n_vertices() const { return n_vertices_; }
  std::uint64_t n_edges() const { return n_edges_; }

  std::vector<int> coordinates(Vertex v) const;
  Vertex index(std::span<const int> coords) const;
  Vertex origin() const { return origin_; }

  /// Neighbour of v one step along +dir, or false if the edge leaves a free box.
  bool forward_neighbor(Vertex v, int dir, Vertex& out) const;
  std::uint64_t edge_key(Vertex v, int dir) const {
    return static_cast<std::uint64_t>(v) * static_cast<std::uint64_t>(d_) +
           static_cast<std::uint64_t>(dir);
  }

  template <class Fn>
  void for_each_edge(Fn&& fn) const {
    for (Vertex v = 0; v < n_vertices_; ++v) {
      for (int dir = 0; dir < d_; ++dir) {
        Vertex u;
        if (forward_neighbor(v, dir, u)) fn(edge_key(v, dir), v, u);
      }
    }
  }

  bool operator==(const LatticeGeometry&) const = default;

 private:
  int d_;
  int N_;
  int side_;
  Boundary boundary_;
  std::uint64_t n_vertices_;
  std::uint64_t n_edges_;
  std::vector<std::uint64_t> stride_;
  Vertex origin_;
};

LatticeGeometry build_geometry(int d, int N, Boundary boundary);

/// Whether lattice edge `key` is open in the configuration (p, seed). One
/// uniform per edge; open iff u < p, which couples all p monotonically.
bool bond_open(double p, std::uint64_t seed, std::uint64_t key);

/// Sampled bond configuration, stored as its open-cluster partition.
class PercolationConfig {
 public:
  PercolationConfig(LatticeGeometry geometry, double p, std::uint64_t seed,
                    std::vector<Vertex> labels, std::vector<std::uint64_t> cluster_sizes);

  const LatticeGeometry& geometry() const { return geometry_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  /// Cluster label per vertex; labels are dense and ordered by smallest member.
  std::span<const Vertex> labels() const { return labels_; }
  Vertex cluster_of(Vertex v) const { return labels_[v]; }
  std::span<const std::uint64_t> cluster_sizes() const { return cluster_sizes_; }
  std::uint64_t cluster_size_at(Vertex v) const { return cluster_sizes_[labels_[v]]; }
  std::uint64_t n_clusters() const { return cluster_sizes_.size(); }

 private:
  LatticeGeometry geometry_;
  double p_;
  std::uint64_t seed_;
  std::vector<Vertex> labels_;
  std::vector<std::uint64_t> cluster_sizes_;
};

PercolationConfig sample_percolation(const LatticeGeometry& geometry, double p, std::uint64_t seed);

struct Census {
  std::map<std::uint64_t, std::uint64_t> counts;  // k -> N_k
  std::uint64_t n_clusters = 0;                    // K_N
  std::uint64_t n_vertices = 0;                    // |B(N)|
  std::uint64_t max_size = 0;
};

Census cluster_census(const PercolationConfig& config);

/// Writes `k,N_k` rows with a header line.
void write_census_csv(std::ostream& out, const Census& census);

std::uint64_t origin_cluster_size(const PercolationConfig& config);

}  // namespace percograph::lattice
