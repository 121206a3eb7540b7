#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "percograph/cluster_distribution.hpp"

namespace percograph::theory {

using dist::ClusterSizeDistribution;

enum class Phase { kSubcritical, kCritical, kSupercritical };

std::string to_string(Phase phase);

/// |c - c_cr| below this is classified as critical.
inline constexpr double kCriticalBand = 1e-9;

/// 1e-10 for the exact law, 1e-8 for empirical or tabulated laws.
double default_tolerance(const ClusterSizeDistribution& dist);

/// Critical long-range intensity 1 / E|C|.
double c_critical(const ClusterSizeDistribution& dist);

/// One-dimensional dual threshold (1 - c) / (1 + c), defined for 0 < c < 1.
double p_critical_d1(double c);

Phase classify(const ClusterSizeDistribution& dist, double c);

struct BetaSolution {
  double beta = 0.0;
  double residual = 0.0;  // |beta - (1 - E e^{-c beta |C|})|
  std::uint64_t iterations = 0;
};

/// Maximal root of beta = 1 - E e^{-c beta |C|}. Iterates the increasing map
/// from beta = 1, so the iterates decrease onto the largest fixed point. Zero in
/// the sub- and critical phases.
BetaSolution solve_beta_detailed(const ClusterSizeDistribution& dist, double c, double tol);
double solve_beta(const ClusterSizeDistribution& dist, double c, double tol);
inline double solve_beta(const ClusterSizeDistribution& dist, double c) {
  return solve_beta(dist, c, default_tolerance(dist));
}

/// Survival probability of a type-x ancestor, 1 - e^{-c beta x}.
double rho_of_type(std::uint64_t x, double c, double beta);

struct AlphaSolution {
  double y_root = 0.0;    // root of E c|C| e^{c|C|y} = 1
  double alpha = 0.0;     // (c + c y - E c e^{c|C|y})^{-1}
  double z0 = 0.0;        // exp(c (1 + y - E e^{c|C|y}))
  double residual = 0.0;  // E c|C| e^{c|C|y} - 1 at the returned root
};

/// Subcritical log-constant. Requires 0 < c < c_critical(dist).
AlphaSolution solve_alpha(const ClusterSizeDistribution& dist, double c, double tol);
inline AlphaSolution solve_alpha(const ClusterSizeDistribution& dist, double c) {
  return solve_alpha(dist, c, default_tolerance(dist));
}

/// Slope of beta at c = c_cr from above: 2 (E|C|)^3 / E|C|^2.
double beta_derivative_at_cr(const ClusterSizeDistribution& dist);

/// Mean degree 2p + c_cr(p) at criticality in one dimension.
double critical_mean_degree_d1(double p);

struct AzResult {
  bool converged = false;
  double value = 0.0;  // A_z when converged
  std::uint64_t iterations = 0;
  std::string reason;  // why the iteration was declared divergent
};

/// Minimal solution A_z >= 1/kappa of A = kappa^{-1} E(z^{|C|} e^{c|C|(kappa A - 1)}),
/// by fixed-point iteration from 1/kappa. Divergence is a valid result (expected
/// for z > z0). Throws DomainError when z >= e^{zeta} or c >= c_cr.
AzResult solve_A_z(const ClusterSizeDistribution& dist, double c, double z, double tol);
inline AzResult solve_A_z(const ClusterSizeDistribution& dist, double c, double z) {
  return solve_A_z(dist, c, z, default_tolerance(dist));
}

/// Every closed-form and fixed-point output at one (p, c). Fields that are not
/// defined in the current phase are NaN.
struct TheoryPoint {
  int d = 1;
  double p = 0.0;
  double c = 0.0;
  double c_cr = 0.0;
  Phase phase = Phase::kSubcritical;
  double beta = 0.0;
  double alpha = 0.0;
  double y_root = 0.0;
  double z0 = 0.0;
  double beta_prime_cr = 0.0;
};

TheoryPoint theory_point(const ClusterSizeDistribution& dist, int d, double p, double c,
                         double tol);

std::string theory_csv_header();
std::string to_csv_row(const TheoryPoint& point);
nlohmann::json to_json(const TheoryPoint& point);

}  // namespace percograph::theory
