#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace percograph {

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  using Index = std::uint32_t;

  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), components_(n) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }

  Index find(Index v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  /// Returns true if a merge happened.
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --components_;
    return true;
  }

  std::size_t size() const { return parent_.size(); }
  std::size_t components() const { return components_; }
  Index component_size(Index v) { return size_[find(v)]; }

  /// Dense labels 0..components()-1, numbered in order of each component's
  /// smallest member. Deterministic for a given partition.
  std::vector<Index> dense_labels() {
    constexpr Index kUnset = ~Index{0};
    std::vector<Index> root_label(parent_.size(), kUnset);
    std::vector<Index> labels(parent_.size());
    Index next = 0;
    for (Index v = 0; v < parent_.size(); ++v) {
      Index r = find(v);
      if (root_label[r] == kUnset) root_label[r] = next++;
      labels[v] = root_label[r];
    }
    return labels;
  }

 private:
  std::vector<Index> parent_;
  std::vector<Index> size_;
  std::size_t components_;
};

}  // namespace percograph
