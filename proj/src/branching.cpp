#include "percograph/branching.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "percograph/format.hpp"

namespace percograph::branching {
namespace {

constexpr std::uint64_t kAmbiguousThreshold = 1000;

std::vector<double> truncated_weights(const ClusterSizeDistribution& dist) {
  std::vector<double> w;
  if (dist.kind() == dist::Kind::kExactD1) {
    for (std::uint64_t k = 1;; ++k) {
      w.push_back(dist.pmf(k));
      if (dist.mass_above(k) < 1e-12 || k >= dist.k_max()) break;
    }
  } else {
    for (std::uint64_t k = 1; k <= dist.k_max(); ++k) w.push_back(dist.pmf(k));
  }
  return w;
}

}  // namespace

TypeSampler::TypeSampler(const ClusterSizeDistribution& dist) {
  const std::vector<double> w = truncated_weights(dist);
  pick_ = std::discrete_distribution<std::uint32_t>(w.begin(), w.end());
  support_ = w.size();
}

void sample_offspring(std::uint64_t x, double c, TypeSampler& types, Engine& rng,
                      std::vector<std::uint64_t>& out) {
  out.clear();
  const double mean = c * static_cast<double>(x);
  if (mean <= 0.0) return;
  std::poisson_distribution<std::uint64_t> count(mean);
  const std::uint64_t n = count(rng);
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(types(rng));
}

ProgenyOutcome simulate_progeny(std::uint64_t k, double c, TypeSampler& types, const Caps& caps,
                                Engine& rng) {
  if (k == 0) throw std::invalid_argument("root type k must be >= 1");
  if (caps.max_particles == 0 || caps.max_generations == 0)
    throw std::invalid_argument("branching caps must be positive");
  ProgenyOutcome o;
  o.root_type = k;
  o.n_particles = 1;
  o.type_sum = k;
  std::vector<std::uint64_t> current{k};
  std::vector<std::uint64_t> next;
  std::vector<std::uint64_t> children;
  while (!current.empty()) {
    if (o.generations >= caps.max_generations) {
      o.hit_cap = true;
      break;
    }
    next.clear();
    for (std::uint64_t x : current) {
      sample_offspring(x, c, types, rng, children);
      for (std::uint64_t y : children) {
        next.push_back(y);
        o.type_sum += y;
      }
      o.n_particles += children.size();
      if (o.n_particles > caps.max_particles) break;
    }
    ++o.generations;
    if (o.generations == 1) o.first_generation = next.size();
    if (o.n_particles > caps.max_particles) {
      o.hit_cap = true;
      break;
    }
    current.swap(next);
  }
  return o;
}

ProgenyOutcome simulate_progeny(std::uint64_t k, double c, const ClusterSizeDistribution& dist,
                                const Caps& caps, std::uint64_t seed) {
  TypeSampler types(dist);
  Engine rng = make_engine({seed});
  return simulate_progeny(k, c, types, caps, rng);
}

SurvivalEstimate estimate_survival(std::uint64_t k, double c, const ClusterSizeDistribution& dist,
                                   std::uint64_t reps, const Caps& caps, std::uint64_t base_seed) {
  if (reps < 1000) throw std::invalid_argument("estimate_survival requires reps >= 1000");
  TypeSampler types(dist);
  std::uint64_t survived = 0;
  std::uint64_t ambiguous = 0;
  for (std::uint64_t i = 0; i < reps; ++i) {
    Engine rng = make_engine({base_seed, i});
    const auto o = simulate_progeny(k, c, types, caps, rng);
    if (o.hit_cap)
      ++survived;
    else if (o.n_particles > kAmbiguousThreshold)
      ++ambiguous;
  }
  SurvivalEstimate s;
  s.k = k;
  s.c = c;
  s.reps = reps;
  const double n = static_cast<double>(reps);
  s.rho_hat = static_cast<double>(survived) / n;
  s.standard_error = std::sqrt(s.rho_hat * (1.0 - s.rho_hat) / n);
  s.ci_lo = std::max(0.0, s.rho_hat - 1.96 * s.standard_error);
  s.ci_hi = std::min(1.0, s.rho_hat + 1.96 * s.standard_error);
  s.ambiguous_fraction = static_cast<double>(ambiguous) / n;
  return s;
}

OffspringMean mean_offspring_check(std::uint64_t x, double c, const ClusterSizeDistribution& dist,
                                   std::uint64_t reps, std::uint64_t seed) {
  if (reps < 10'000) throw std::invalid_argument("mean_offspring_check requires reps >= 10000");
  TypeSampler types(dist);
  Engine rng = make_engine({seed, x});
  std::vector<std::uint64_t> children;
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t i = 0; i < reps; ++i) {
    sample_offspring(x, c, types, rng, children);
    const double m = static_cast<double>(children.size());
    sum += m;
    sum2 += m * m;
  }
  const double n = static_cast<double>(reps);
  OffspringMean out;
  out.mean = sum / n;
  const double var = std::max(0.0, sum2 / n - out.mean * out.mean);
  out.standard_error = std::sqrt(var / n);
  out.expected = c * static_cast<double>(x);
  return out;
}

std::string survival_csv_header() { return "k,c,p_or_dist_tag,reps,rho_hat,ci_lo,ci_hi"; }

std::string survival_csv_row(const SurvivalEstimate& s, const std::string& dist_tag) {
  std::ostringstream out;
  out << s.k << ',' << format_number(s.c) << ',' << dist_tag << ',' << s.reps << ','
      << format_number(s.rho_hat) << ',' << format_number(s.ci_lo) << ','
      << format_number(s.ci_hi);
  return out.str();
}

}  // namespace percograph::branching
