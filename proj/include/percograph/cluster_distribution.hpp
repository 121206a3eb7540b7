#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "percograph/lattice.hpp"

namespace percograph::dist {

enum class Kind { kExactD1, kEmpirical, kTable };

std::string to_string(Kind kind);

/// Result of a truncated series E f(|C|).
struct Expectation {
  double value = 0.0;
  double error_bound = 0.0;  // bound on the neglected tail of the series
  bool diverged = false;     // growth rate of f at or beyond the decay rate of the law
  std::uint64_t terms = 0;
};

/// Law of the size |C| of the open cluster at the origin.
///
/// Three construction paths: the exact one-dimensional law
/// P{|C|=k} = (1-p)^2 k p^(k-1), an empirical per-site estimate from sampled
/// configurations, or an explicit table. Non-exact kinds have finite support
/// 1..k_max() and may leave tail_mass() unassigned.
class ClusterSizeDistribution {
 public:
  static ClusterSizeDistribution exact_d1(double p);
  /// pmf[i] = P{|C| = i+1}. The remainder 1 - sum is recorded as tail mass.
  static ClusterSizeDistribution from_table(std::vector<double> pmf);
  static ClusterSizeDistribution point_mass();
  /// Per-site estimator, pooling K_N cluster counts: P^{k} = sum k N_k / sum |B(N)|.
  static ClusterSizeDistribution from_census(std::span<const lattice::Census> censuses,
                                             std::optional<lattice::Boundary> boundary = {});
  /// One independent observed size per sample (e.g. the origin cluster across seeds).
  static ClusterSizeDistribution from_site_sizes(std::span<const std::uint64_t> sizes);

  Kind kind() const { return kind_; }
  /// Only meaningful for the exact kind.
  double p() const { return p_; }
  double pmf(std::uint64_t k) const;
  /// P{|C| > k}.
  double mass_above(std::uint64_t k) const;
  std::uint64_t k_max() const { return k_max_; }
  double tail_mass() const { return tail_mass_; }
  std::uint64_t sample_size() const { return sample_size_; }
  /// Observed counts behind pmf(k) (clusters for census input, samples for site input).
  std::uint64_t occurrences(std::uint64_t k) const;
  std::optional<lattice::Boundary> boundary() const { return boundary_; }
  /// Monte Carlo standard error of pmf(k); zero for exact or tabulated laws.
  double standard_error(std::uint64_t k) const;

  /// Exponential decay rate used to decide which exponential moments exist:
  /// -log p for the exact law, the regression estimate for tables, or +inf when a
  /// finite-support table has no estimable tail.
  double zeta_hat() const { return zeta_hat_; }

  /// Sum_k f(k) pmf(k). `growth_rate` is r with |f(k)| <= A k^m e^{r k}; the call
  /// reports divergence when r >= zeta_hat(). For the exact law the series is
  /// summed until the geometric tail bound drops below `tol` relative.
  Expectation expect(const std::function<double(std::uint64_t)>& f, double growth_rate,
                     double tol = 1e-15) const;

  /// E[poly(|C|) e^{rate |C|}] evaluated in log space, so large rates near the
  /// decay rate neither overflow nor underflow. Diverges when rate >= zeta_hat().
  Expectation expect_exp(const std::function<double(std::uint64_t)>& poly, double rate,
                         double tol = 1e-15) const;

  double mean() const;          // E|C|
  double second_moment() const;  // E|C|^2
  double kappa() const;          // E(1/|C|)

 private:
  ClusterSizeDistribution() = default;
  void finalize_table();

  Kind kind_ = Kind::kTable;
  double p_ = 0.0;
  std::vector<double> table_;  // k-1 indexed for non-exact kinds
  std::vector<std::uint64_t> occurrences_;
  std::uint64_t k_max_ = 0;
  double tail_mass_ = 0.0;
  std::uint64_t sample_size_ = 0;
  bool per_cluster_counts_ = false;
  std::optional<lattice::Boundary> boundary_;
  double zeta_hat_ = 0.0;
};

/// Least-squares slope of -log P{|C|=k} against k over the top ten support values
/// that have at least 50 observations. Exact law: -log p.
double estimate_zeta(const ClusterSizeDistribution& dist);

/// Type measure of the macro-vertex graph: mu(k) = P{|C|=k} / (k kappa),
/// its companion tail mu~(k) = sum_{n>=k} P{|C|=n}, and kappa = E(1/|C|).
struct TypeMeasure {
  std::vector<double> mu;        // index k-1
  std::vector<double> mu_tilde;  // index k-1
  double kappa = 0.0;

  double mu_at(std::uint64_t k) const { return k >= 1 && k <= mu.size() ? mu[k - 1] : 0.0; }
  double mu_tilde_at(std::uint64_t k) const {
    return k >= 1 && k <= mu_tilde.size() ? mu_tilde[k - 1] : 0.0;
  }
};

TypeMeasure type_measure(const ClusterSizeDistribution& dist);

nlohmann::json to_json(const ClusterSizeDistribution& dist);
ClusterSizeDistribution distribution_from_json(const nlohmann::json& j);
/// Columns `k,probability`. The exact law is written as a tag comment only.
void write_csv(std::ostream& out, const ClusterSizeDistribution& dist);
ClusterSizeDistribution read_csv(std::istream& in);

}  // namespace percograph::dist
