#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "percograph/cluster_distribution.hpp"
#include "percograph/rng.hpp"

namespace percograph::branching {

using dist::ClusterSizeDistribution;

struct Caps {
  std::uint64_t max_particles = 1'000'000;
  std::uint64_t max_generations = 10'000;
};

struct ProgenyOutcome {
  std::uint64_t root_type = 0;
  std::uint64_t n_particles = 0;  // total progeny including the ancestor
  std::uint64_t type_sum = 0;     // sum of types including the ancestor
  std::uint64_t first_generation = 0;
  std::uint64_t generations = 0;
  bool hit_cap = false;
};

/// Draws child types from P{|C| = .}, truncated where the remaining mass is
/// below 1e-12 (exact law) or at the table support.
class TypeSampler {
 public:
  explicit TypeSampler(const ClusterSizeDistribution& dist);
  std::uint64_t operator()(Engine& rng) { return static_cast<std::uint64_t>(pick_(rng)) + 1; }
  std::uint64_t support() const { return support_; }

 private:
  std::discrete_distribution<std::uint32_t> pick_;
  std::uint64_t support_;
};

/// Children of one type-x particle. The offspring of type y are
/// Poisson(kappa(x,y) mu(y)) with kappa(x,y) = c kappa(p) x y; summed over y this is
/// Poisson(c x) children with i.i.d. types drawn from P{|C| = .} (Poisson thinning).
void sample_offspring(std::uint64_t x, double c, TypeSampler& types, Engine& rng,
                      std::vector<std::uint64_t>& out);

/// Breadth-first multi-type Galton-Watson tree from one type-k ancestor.
ProgenyOutcome simulate_progeny(std::uint64_t k, double c, TypeSampler& types, const Caps& caps,
                                Engine& rng);
ProgenyOutcome simulate_progeny(std::uint64_t k, double c, const ClusterSizeDistribution& dist,
                                const Caps& caps, std::uint64_t seed);

struct SurvivalEstimate {
  std::uint64_t k = 0;
  double c = 0.0;
  std::uint64_t reps = 0;
  double rho_hat = 0.0;
  double standard_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  /// Runs that went extinct after exceeding 1000 particles but before the cap.
  double ambiguous_fraction = 0.0;
};

/// Fraction of runs reaching a cap, with a 95% normal-approximation CI.
/// Replicate i uses seed mix(base_seed, i).
SurvivalEstimate estimate_survival(std::uint64_t k, double c, const ClusterSizeDistribution& dist,
                                   std::uint64_t reps, const Caps& caps, std::uint64_t base_seed);

struct OffspringMean {
  double mean = 0.0;
  double standard_error = 0.0;
  double expected = 0.0;  // c x
};

OffspringMean mean_offspring_check(std::uint64_t x, double c, const ClusterSizeDistribution& dist,
                                   std::uint64_t reps, std::uint64_t seed);

std::string survival_csv_header();
std::string survival_csv_row(const SurvivalEstimate& s, const std::string& dist_tag);

}  // namespace percograph::branching
