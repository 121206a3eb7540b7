#include "percograph/lattice.hpp"

#include <limits>
#include <stdexcept>
#include <utility>

#include "percograph/rng.hpp"
#include "percograph/union_find.hpp"

namespace percograph::lattice {

std::string to_string(Boundary b) { return b == Boundary::kTorus ? "torus" : "free"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "torus") return Boundary::kTorus;
  if (s == "free") return Boundary::kFree;
  throw std::invalid_argument("boundary must be 'free' or 'torus', got '" + s + "'");
}

LatticeGeometry::LatticeGeometry(int d, int N, Boundary boundary)
    : d_(d), N_(N), side_(0), boundary_(boundary), n_vertices_(1), n_edges_(0) {
  if (d < 1) throw std::invalid_argument("dimension d must be >= 1");
  if (N < 1) throw std::invalid_argument("box radius N must be >= 1");
  if (N > (std::numeric_limits<int>::max() - 1) / 2)
    throw std::invalid_argument("box radius N too large");
  side_ = 2 * N + 1;
  stride_.reserve(d);
  for (int i = 0; i < d; ++i) {
    stride_.push_back(n_vertices_);
    if (n_vertices_ > kMaxVertices / static_cast<std::uint64_t>(side_))
      throw std::invalid_argument("box too large for addressing: (2N+1)^d exceeds 2^31 vertices");
    n_vertices_ *= static_cast<std::uint64_t>(side_);
  }
  if (n_vertices_ > kMaxVertices)
    throw std::invalid_argument("box too large for addressing: (2N+1)^d exceeds 2^31 vertices");
  const std::uint64_t per_dir =
      boundary_ == Boundary::kTorus ? n_vertices_ : n_vertices_ / side_ * (side_ - 1);
  n_edges_ = per_dir * static_cast<std::uint64_t>(d_);
  std::uint64_t o = 0;
  for (std::uint64_t s : stride_) o += s * static_cast<std::uint64_t>(N_);
  origin_ = static_cast<Vertex>(o);
}

std::vector<int> LatticeGeometry::coordinates(Vertex v) const {
  std::vector<int> x(d_);
  std::uint64_t rest = v;
  for (int i = 0; i < d_; ++i) {
    x[i] = static_cast<int>(rest % side_) - N_;
    rest /= side_;
  }
  return x;
}

Vertex LatticeGeometry::index(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != d_)
    throw std::invalid_argument("coordinate arity does not match dimension");
  std::uint64_t v = 0;
  for (int i = 0; i < d_; ++i) {
    if (coords[i] < -N_ || coords[i] > N_) throw std::invalid_argument("coordinate outside box");
    v += stride_[i] * static_cast<std::uint64_t>(coords[i] + N_);
  }
  return static_cast<Vertex>(v);
}

bool LatticeGeometry::forward_neighbor(Vertex v, int dir, Vertex& out) const {
  const std::uint64_t s = stride_[dir];
  const std::uint64_t digit = (v / s) % side_;
  if (digit + 1 < static_cast<std::uint64_t>(side_)) {
    out = static_cast<Vertex>(v + s);
    return true;
  }
  if (boundary_ == Boundary::kFree) return false;
  out = static_cast<Vertex>(v - digit * s);
  return true;
}

LatticeGeometry build_geometry(int d, int N, Boundary boundary) {
  return LatticeGeometry(d, N, boundary);
}

bool bond_open(double p, std::uint64_t seed, std::uint64_t key) {
  return keyed_uniform(seed, key) < p;
}

PercolationConfig::PercolationConfig(LatticeGeometry geometry, double p, std::uint64_t seed,
                                     std::vector<Vertex> labels,
                                     std::vector<std::uint64_t> cluster_sizes)
    : geometry_(std::move(geometry)),
      p_(p),
      seed_(seed),
      labels_(std::move(labels)),
      cluster_sizes_(std::move(cluster_sizes)) {}

PercolationConfig sample_percolation(const LatticeGeometry& geometry, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bond probability p must lie in [0,1]");
  UnionFind uf(geometry.n_vertices());
  if (p > 0.0) {
    geometry.for_each_edge([&](std::uint64_t key, Vertex a, Vertex b) {
      if (bond_open(p, seed, key)) uf.unite(a, b);
    });
  }
  std::vector<Vertex> labels = uf.dense_labels();
  std::vector<std::uint64_t> sizes(uf.components(), 0);
  for (Vertex l : labels) ++sizes[l];
  return PercolationConfig(geometry, p, seed, std::move(labels), std::move(sizes));
}

Census cluster_census(const PercolationConfig& config) {
  Census census;
  census.n_clusters = config.n_clusters();
  census.n_vertices = config.geometry().n_vertices();
  for (std::uint64_t s : config.cluster_sizes()) {
    ++census.counts[s];
    if (s > census.max_size) census.max_size = s;
  }
  return census;
}

void write_census_csv(std::ostream& out, const Census& census) {
  out << "k,N_k\n";
  for (const auto& [k, n] : census.counts) out << k << ',' << n << '\n';
}

std::uint64_t origin_cluster_size(const PercolationConfig& config) {
  return config.cluster_size_at(config.geometry().origin());
}

}  // namespace percograph::lattice
