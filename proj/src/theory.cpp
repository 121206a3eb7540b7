#include "percograph/theory.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "percograph/errors.hpp"
#include "percograph/format.hpp"

namespace percograph::theory {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kBetaIterationCap = 100'000;
constexpr std::uint64_t kAzIterationCap = 100'000;

double checked(const dist::Expectation& e, const char* what) {
  if (e.diverged || !std::isfinite(e.value))
    throw DomainError(std::string(what) + " diverges for this distribution");
  return e.value;
}

double one(std::uint64_t) { return 1.0; }

// Margin kept between the exponential rate c*y and the decay rate zeta so the
// series stays summable in reasonable time.
double finiteness_margin(double zeta) { return std::max(1e-6, 1e-3 * zeta); }

}  // namespace

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::kSubcritical: return "subcritical";
    case Phase::kCritical: return "critical";
    case Phase::kSupercritical: return "supercritical";
  }
  return "subcritical";
}

double default_tolerance(const ClusterSizeDistribution& dist) {
  return dist.kind() == dist::Kind::kExactD1 ? 1e-10 : 1e-8;
}

double c_critical(const ClusterSizeDistribution& dist) {
  const auto e = dist.expect([](std::uint64_t k) { return static_cast<double>(k); }, 0.0);
  const double mean = checked(e, "E|C|");
  if (e.error_bound > 1e-6 * mean)
    throw DomainError("E|C| is not certified: truncation error too large (p too close to p_c)");
  return 1.0 / mean;
}

double p_critical_d1(double c) {
  if (!(c > 0.0 && c < 1.0))
    throw std::invalid_argument("the dual threshold p_cr(c) requires 0 < c < 1");
  return (1.0 - c) / (1.0 + c);
}

Phase classify(const ClusterSizeDistribution& dist, double c) {
  const double ccr = c_critical(dist);
  if (std::abs(c - ccr) < kCriticalBand) return Phase::kCritical;
  return c < ccr ? Phase::kSubcritical : Phase::kSupercritical;
}

BetaSolution solve_beta_detailed(const ClusterSizeDistribution& dist, double c, double tol) {
  if (!(c >= 0.0)) throw std::invalid_argument("long-range intensity c must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  BetaSolution out;
  if (classify(dist, c) != Phase::kSupercritical) return out;

  auto g = [&](double beta) {
    return 1.0 - checked(dist.expect_exp(one, -c * beta), "E e^{-c beta |C|}");
  };
  double beta = 1.0;
  for (std::uint64_t it = 1; it <= kBetaIterationCap; ++it) {
    const double next = g(beta);
    const double step = beta - next;
    beta = next;
    if (std::abs(step) < tol) {
      out.beta = beta;
      out.iterations = it;
      out.residual = std::abs(beta - g(beta));
      return out;
    }
  }
  std::ostringstream msg;
  msg << "beta fixed-point iteration did not converge within " << kBetaIterationCap
      << " iterations (residual " << std::abs(beta - g(beta)) << ")";
  throw DomainError(msg.str());
}

double solve_beta(const ClusterSizeDistribution& dist, double c, double tol) {
  return solve_beta_detailed(dist, c, tol).beta;
}

double rho_of_type(std::uint64_t x, double c, double beta) {
  if (x == 0) throw std::invalid_argument("type x must be >= 1");
  return -std::expm1(-c * beta * static_cast<double>(x));
}

AlphaSolution solve_alpha(const ClusterSizeDistribution& dist, double c, double tol) {
  if (!(c > 0.0)) throw std::invalid_argument("solve_alpha requires c > 0");
  if (classify(dist, c) != Phase::kSubcritical)
    throw DomainError("solve_alpha requires the subcritical phase c < c_cr");

  const double zeta = dist.zeta_hat();
  const double y_cap = std::isinf(zeta) ? std::numeric_limits<double>::infinity()
                                        : (zeta - finiteness_margin(zeta)) / c;
  auto h = [&](double y) {
    return checked(dist.expect_exp([c](std::uint64_t k) { return c * static_cast<double>(k); },
                                   c * y),
                   "E c|C| e^{c|C|y}") -
           1.0;
  };

  // h is strictly increasing with h(0) = c E|C| - 1 < 0.
  double lo = 0.0;
  double hi = 1.0;
  while (true) {
    if (hi >= y_cap) {
      hi = y_cap;
      if (h(hi) < 0.0)
        throw DomainError("y search left the finiteness domain c*y < zeta before bracketing");
      break;
    }
    if (h(hi) >= 0.0) break;
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  AlphaSolution out;
  out.y_root = 0.5 * (lo + hi);
  out.residual = h(out.y_root);
  const double m = checked(dist.expect_exp(one, c * out.y_root), "E e^{c|C|y}");
  const double a0 = 1.0 + out.y_root - m;
  out.alpha = 1.0 / (c + c * out.y_root - c * m);
  out.z0 = std::exp(c * a0);
  if (!(out.alpha > 0.0)) throw DomainError("alpha is not positive at the computed root");
  if (std::abs(out.alpha - 1.0 / std::log(out.z0)) > tol * out.alpha)
    throw DomainError("alpha and 1/log z0 disagree beyond tolerance");
  return out;
}

double beta_derivative_at_cr(const ClusterSizeDistribution& dist) {
  const double m1 = dist.mean();
  const double m2 = dist.second_moment();
  return 2.0 * m1 * m1 * m1 / m2;
}

double critical_mean_degree_d1(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("critical mean degree needs 0 <= p < 1");
  return 2.0 * p + (1.0 - p) / (1.0 + p);
}

AzResult solve_A_z(const ClusterSizeDistribution& dist, double c, double z, double tol) {
  if (!(z >= 1.0)) throw std::invalid_argument("solve_A_z requires z >= 1");
  if (!(c >= 0.0)) throw std::invalid_argument("long-range intensity c must be >= 0");
  if (classify(dist, c) != Phase::kSubcritical)
    throw DomainError("solve_A_z requires the subcritical phase c < c_cr");
  const double zeta = dist.zeta_hat();
  const double log_z = std::log(z);
  if (log_z >= zeta) throw DomainError("z violates the finiteness condition z < e^{zeta}");

  const double kappa = dist.kappa();
  AzResult out;
  // y = kappa * A_z satisfies y = E(z^{|C|} e^{c|C|(y-1)}), starting from y = 1.
  double y = 1.0;
  for (std::uint64_t it = 1; it <= kAzIterationCap; ++it) {
    out.iterations = it;
    const double rate = log_z + c * (y - 1.0);
    if (rate >= zeta) {
      out.reason = "iterate crossed the finiteness boundary";
      return out;
    }
    const auto e = dist.expect_exp(one, rate);
    if (e.diverged || !std::isfinite(e.value)) {
      out.reason = "expectation diverged";
      return out;
    }
    const double next = e.value;
    if (std::abs(next - y) <= tol * std::max(1.0, next)) {
      out.converged = true;
      out.value = next / kappa;
      return out;
    }
    y = next;
  }
  out.reason = "iteration cap reached";
  return out;
}

TheoryPoint theory_point(const ClusterSizeDistribution& dist, int d, double p, double c,
                         double tol) {
  TheoryPoint t;
  t.d = d;
  t.p = p;
  t.c = c;
  t.c_cr = c_critical(dist);
  t.phase = classify(dist, c);
  t.beta = solve_beta(dist, c, tol);
  t.alpha = t.y_root = t.z0 = kNaN;
  if (t.phase == Phase::kSubcritical && c > 0.0) {
    const auto a = solve_alpha(dist, c, tol);
    t.alpha = a.alpha;
    t.y_root = a.y_root;
    t.z0 = a.z0;
  }
  try {
    t.beta_prime_cr = beta_derivative_at_cr(dist);
  } catch (const DomainError&) {
    t.beta_prime_cr = kNaN;
  }
  return t;
}

std::string theory_csv_header() { return "d,p,c,c_cr,phase,beta,alpha,y_root,z0,beta_prime_cr"; }

std::string to_csv_row(const TheoryPoint& t) {
  std::ostringstream out;
  out << t.d << ',' << format_number(t.p) << ',' << format_number(t.c) << ','
      << format_number(t.c_cr) << ',' << to_string(t.phase) << ',' << format_number(t.beta) << ','
      << format_number(t.alpha) << ',' << format_number(t.y_root) << ',' << format_number(t.z0)
      << ',' << format_number(t.beta_prime_cr);
  return out.str();
}

nlohmann::json to_json(const TheoryPoint& t) {
  auto num = [](double x) -> nlohmann::json {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(format_number(x));
  };
  return {{"d", t.d},
          {"p", num(t.p)},
          {"c", num(t.c)},
          {"c_cr", num(t.c_cr)},
          {"phase", to_string(t.phase)},
          {"beta", num(t.beta)},
          {"alpha", num(t.alpha)},
          {"y_root", num(t.y_root)},
          {"z0", num(t.z0)},
          {"beta_prime_cr", num(t.beta_prime_cr)}};
}

}  // namespace percograph::theory
