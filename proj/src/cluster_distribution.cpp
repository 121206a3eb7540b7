#include "percograph/cluster_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "percograph/errors.hpp"

namespace percograph::dist {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMaxTerms = 50'000'000;
constexpr std::uint64_t kZetaMinOccurrences = 50;
constexpr std::uint64_t kZetaWindow = 10;
constexpr std::uint64_t kZetaMinSupport = 20;

// Geometric tail bound used when summing the exact law: for terms of the form
// polynomial x geometric the successive ratio decreases, so
// sum_{j>k} t_j <= t_k r_k / (1 - r_k).
struct SeriesSum {
  double sum = 0.0;
  double prev = 0.0;
  bool done = false;
  double bound = kInf;

  void add(double t, double tol) {
    sum += t;
    if (prev != 0.0 && t != 0.0) {
      const double r = std::abs(t / prev);
      if (r < 1.0) {
        bound = std::abs(t) * r / (1.0 - r);
        if (bound <= tol * std::max(1.0, std::abs(sum))) done = true;
      }
    }
    prev = t;
  }
};

}  // namespace

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::kExactD1: return "exact_d1";
    case Kind::kEmpirical: return "empirical";
    case Kind::kTable: return "table";
  }
  return "table";
}

ClusterSizeDistribution ClusterSizeDistribution::exact_d1(double p) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::invalid_argument("exact_d1 requires 0 <= p < 1 (p_c = 1 in one dimension)");
  ClusterSizeDistribution d;
  d.kind_ = Kind::kExactD1;
  d.p_ = p;
  d.zeta_hat_ = p == 0.0 ? kInf : -std::log(p);
  if (p == 0.0) {
    d.k_max_ = 1;
  } else {
    // K_max = 10 / zeta * log(1/tol) with tol = 1e-12.
    const double k = std::ceil(10.0 / d.zeta_hat_ * std::log(1e12));
    d.k_max_ = static_cast<std::uint64_t>(std::clamp(k, 1.0, 1e8));
  }
  d.tail_mass_ = d.mass_above(d.k_max_);
  return d;
}

ClusterSizeDistribution ClusterSizeDistribution::from_table(std::vector<double> pmf) {
  if (pmf.empty()) throw std::invalid_argument("distribution table is empty");
  for (double v : pmf)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("distribution table has a negative or non-finite entry");
  ClusterSizeDistribution d;
  d.kind_ = Kind::kTable;
  d.table_ = std::move(pmf);
  d.finalize_table();
  return d;
}

ClusterSizeDistribution ClusterSizeDistribution::point_mass() { return from_table({1.0}); }

ClusterSizeDistribution ClusterSizeDistribution::from_census(
    std::span<const lattice::Census> censuses, std::optional<lattice::Boundary> boundary) {
  std::uint64_t sites = 0;
  std::map<std::uint64_t, std::uint64_t> pooled;
  for (const auto& c : censuses) {
    sites += c.n_vertices;
    for (const auto& [k, n] : c.counts) {
      if (k == 0) throw std::invalid_argument("cluster sizes must be >= 1");
      pooled[k] += n;
    }
  }
  if (sites == 0 || pooled.empty()) throw std::invalid_argument("empirical sample is empty");
  ClusterSizeDistribution d;
  d.kind_ = Kind::kEmpirical;
  d.boundary_ = boundary;
  d.sample_size_ = sites;
  d.per_cluster_counts_ = true;
  const std::uint64_t kmax = pooled.rbegin()->first;
  d.table_.assign(kmax, 0.0);
  d.occurrences_.assign(kmax, 0);
  for (const auto& [k, n] : pooled) {
    d.table_[k - 1] = static_cast<double>(k) * static_cast<double>(n) / static_cast<double>(sites);
    d.occurrences_[k - 1] = n;
  }
  d.finalize_table();
  return d;
}

ClusterSizeDistribution ClusterSizeDistribution::from_site_sizes(
    std::span<const std::uint64_t> sizes) {
  if (sizes.empty()) throw std::invalid_argument("empirical sample is empty");
  std::uint64_t kmax = 0;
  for (std::uint64_t s : sizes) {
    if (s == 0) throw std::invalid_argument("cluster sizes must be >= 1");
    kmax = std::max(kmax, s);
  }
  ClusterSizeDistribution d;
  d.kind_ = Kind::kEmpirical;
  d.sample_size_ = sizes.size();
  d.occurrences_.assign(kmax, 0);
  for (std::uint64_t s : sizes) ++d.occurrences_[s - 1];
  d.table_.resize(kmax);
  for (std::uint64_t i = 0; i < kmax; ++i)
    d.table_[i] = static_cast<double>(d.occurrences_[i]) / static_cast<double>(sizes.size());
  d.finalize_table();
  return d;
}

void ClusterSizeDistribution::finalize_table() {
  while (table_.size() > 1 && table_.back() == 0.0) table_.pop_back();
  if (!occurrences_.empty()) occurrences_.resize(table_.size());
  k_max_ = table_.size();
  // Summing in ascending order keeps the normalization check at machine precision.
  std::vector<double> sorted = table_;
  std::sort(sorted.begin(), sorted.end());
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  if (total > 1.0 + 1e-9)
    throw std::invalid_argument("distribution table sums to more than one");
  tail_mass_ = std::max(0.0, 1.0 - total);
  try {
    zeta_hat_ = estimate_zeta(*this);
  } catch (const DomainError&) {
    zeta_hat_ = kInf;
  }
}

double ClusterSizeDistribution::pmf(std::uint64_t k) const {
  if (k == 0) return 0.0;
  if (kind_ == Kind::kExactD1) {
    if (p_ == 0.0) return k == 1 ? 1.0 : 0.0;
    const double q = 1.0 - p_;
    return q * q * static_cast<double>(k) * std::pow(p_, static_cast<double>(k - 1));
  }
  return k <= table_.size() ? table_[k - 1] : 0.0;
}

double ClusterSizeDistribution::mass_above(std::uint64_t k) const {
  if (kind_ == Kind::kExactD1) {
    if (p_ == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kk = static_cast<double>(k);
    return std::pow(p_, kk) * (kk * (1.0 - p_) + 1.0);
  }
  double above = tail_mass_;
  for (std::uint64_t i = k; i < table_.size(); ++i) above += table_[i];
  return std::min(1.0, above);
}

std::uint64_t ClusterSizeDistribution::occurrences(std::uint64_t k) const {
  return k >= 1 && k <= occurrences_.size() ? occurrences_[k - 1] : 0;
}

double ClusterSizeDistribution::standard_error(std::uint64_t k) const {
  if (kind_ != Kind::kEmpirical || sample_size_ == 0) return 0.0;
  const double n = static_cast<double>(sample_size_);
  if (per_cluster_counts_) {
    // pmf(k) = k N_k / n with N_k approximately Poisson.
    return static_cast<double>(k) * std::sqrt(static_cast<double>(occurrences(k))) / n;
  }
  const double f = pmf(k);
  return std::sqrt(f * (1.0 - f) / n);
}

Expectation ClusterSizeDistribution::expect(const std::function<double(std::uint64_t)>& f,
                                            double growth_rate, double tol) const {
  Expectation e;
  if (growth_rate >= zeta_hat_) {
    e.diverged = true;
    e.value = kInf;
    e.error_bound = kInf;
    return e;
  }
  if (kind_ != Kind::kExactD1) {
    // Ascending order keeps the sum of many small terms accurate.
    double sum = 0.0;
    for (std::uint64_t k = table_.size(); k >= 1; --k) {
      if (table_[k - 1] != 0.0) sum += table_[k - 1] * f(k);
    }
    e.value = sum;
    e.terms = table_.size();
    e.error_bound = tail_mass_ == 0.0 ? 0.0 : tail_mass_ * std::abs(f(k_max_ + 1));
    return e;
  }
  SeriesSum s;
  std::uint64_t k = 1;
  for (; k <= kMaxTerms; ++k) {
    const double w = pmf(k);
    if (w == 0.0) {
      s.bound = 0.0;
      break;
    }
    s.add(w * f(k), tol);
    if (s.done) break;
  }
  e.value = s.sum;
  e.terms = k;
  e.error_bound = s.bound;
  if (k > kMaxTerms) e.diverged = true;
  return e;
}

Expectation ClusterSizeDistribution::expect_exp(const std::function<double(std::uint64_t)>& poly,
                                                double rate, double tol) const {
  Expectation e;
  if (rate >= zeta_hat_) {
    e.diverged = true;
    e.value = kInf;
    e.error_bound = kInf;
    return e;
  }
  if (kind_ != Kind::kExactD1) {
    double sum = 0.0;
    for (std::uint64_t k = table_.size(); k >= 1; --k) {
      const double w = table_[k - 1];
      if (w != 0.0) sum += poly(k) * std::exp(rate * static_cast<double>(k) + std::log(w));
    }
    e.value = sum;
    e.terms = table_.size();
    e.error_bound =
        tail_mass_ == 0.0
            ? 0.0
            : tail_mass_ * std::abs(poly(k_max_ + 1)) *
                  std::exp(rate * static_cast<double>(k_max_ + 1));
    return e;
  }
  if (p_ == 0.0) {
    e.value = poly(1) * std::exp(rate);
    e.terms = 1;
    return e;
  }
  const double log_q2 = 2.0 * std::log1p(-p_);
  const double log_p = std::log(p_);
  SeriesSum s;
  std::uint64_t k = 1;
  for (; k <= kMaxTerms; ++k) {
    const double x = static_cast<double>(k);
    const double t = poly(k) * std::exp(rate * x + log_q2 + std::log(x) + (x - 1.0) * log_p);
    if (t == 0.0 && s.prev == 0.0 && k > 1) {
      s.bound = 0.0;
      break;
    }
    s.add(t, tol);
    if (s.done) break;
  }
  e.value = s.sum;
  e.terms = k;
  e.error_bound = s.bound;
  if (k > kMaxTerms) e.diverged = true;
  return e;
}

double ClusterSizeDistribution::mean() const {
  const auto e = expect([](std::uint64_t k) { return static_cast<double>(k); }, 0.0);
  if (e.diverged) throw DomainError("E|C| diverges for this distribution");
  return e.value;
}

double ClusterSizeDistribution::second_moment() const {
  const auto e = expect(
      [](std::uint64_t k) {
        const double x = static_cast<double>(k);
        return x * x;
      },
      0.0);
  if (e.diverged) throw DomainError("E|C|^2 diverges for this distribution");
  return e.value;
}

double ClusterSizeDistribution::kappa() const {
  return expect([](std::uint64_t k) { return 1.0 / static_cast<double>(k); }, 0.0).value;
}

double estimate_zeta(const ClusterSizeDistribution& dist) {
  if (dist.kind() == Kind::kExactD1) {
    if (dist.p() == 0.0) throw DomainError("insufficient tail support: the law is a point mass");
    return -std::log(dist.p());
  }
  if (dist.k_max() < kZetaMinSupport)
    throw DomainError("insufficient tail support to estimate the decay rate");
  const bool counted = dist.sample_size() > 0;
  std::vector<std::uint64_t> ks;
  for (std::uint64_t k = dist.k_max(); k >= 1 && ks.size() < kZetaWindow; --k) {
    const bool usable = counted ? dist.occurrences(k) >= kZetaMinOccurrences : dist.pmf(k) > 0.0;
    if (usable) ks.push_back(k);
  }
  if (ks.size() < kZetaWindow)
    throw DomainError("insufficient tail support to estimate the decay rate");
  double mx = 0.0, my = 0.0;
  for (std::uint64_t k : ks) {
    mx += static_cast<double>(k);
    my += -std::log(dist.pmf(k));
  }
  mx /= static_cast<double>(ks.size());
  my /= static_cast<double>(ks.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::uint64_t k : ks) {
    const double dx = static_cast<double>(k) - mx;
    sxy += dx * (-std::log(dist.pmf(k)) - my);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  if (!(slope > 0.0)) throw DomainError("estimated decay rate is not positive");
  return slope;
}

TypeMeasure type_measure(const ClusterSizeDistribution& dist) {
  if (dist.kind() != Kind::kExactD1 && dist.tail_mass() >= 1e-8)
    throw DomainError("excessive tail mass for the type measure (>= 1e-8)");
  TypeMeasure m;
  const std::uint64_t K = dist.k_max();
  m.kappa = dist.kappa();
  m.mu.resize(K);
  m.mu_tilde.resize(K);
  for (std::uint64_t k = 1; k <= K; ++k)
    m.mu[k - 1] = dist.pmf(k) / (static_cast<double>(k) * m.kappa);
  // mu~(k) = P{|C| >= k}, accumulated from the top so that mu~(k) - mu~(k+1) = pmf(k).
  double acc = dist.mass_above(K);
  for (std::uint64_t k = K; k >= 1; --k) {
    acc += dist.pmf(k);
    m.mu_tilde[k - 1] = acc;
  }
  if (dist.kind() != Kind::kExactD1) m.mu_tilde[0] = 1.0;
  return m;
}

nlohmann::json to_json(const ClusterSizeDistribution& dist) {
  nlohmann::json j;
  j["kind"] = to_string(dist.kind());
  if (dist.kind() == Kind::kExactD1) {
    j["p"] = dist.p();
    return j;
  }
  std::vector<double> pmf(dist.k_max());
  for (std::uint64_t k = 1; k <= dist.k_max(); ++k) pmf[k - 1] = dist.pmf(k);
  j["pmf"] = pmf;
  j["tail_mass"] = dist.tail_mass();
  if (dist.kind() == Kind::kEmpirical) {
    j["sample_size"] = dist.sample_size();
    if (dist.boundary()) j["boundary"] = lattice::to_string(*dist.boundary());
  }
  return j;
}

ClusterSizeDistribution distribution_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exact_d1") return ClusterSizeDistribution::exact_d1(j.at("p").get<double>());
  if (kind == "table" || kind == "empirical")
    return ClusterSizeDistribution::from_table(j.at("pmf").get<std::vector<double>>());
  throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

void write_csv(std::ostream& out, const ClusterSizeDistribution& dist) {
  if (dist.kind() == Kind::kExactD1) {
    out.precision(17);
    out << "# exact_d1 p=" << dist.p() << "\n";
    return;
  }
  out << "k,probability\n";
  out.precision(17);
  for (std::uint64_t k = 1; k <= dist.k_max(); ++k) {
    if (dist.pmf(k) > 0.0) out << k << ',' << dist.pmf(k) << '\n';
  }
}

ClusterSizeDistribution read_csv(std::istream& in) {
  std::string line;
  std::vector<double> pmf;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("exact_d1 p=");
      if (pos != std::string::npos)
        return ClusterSizeDistribution::exact_d1(std::stod(line.substr(pos + 11)));
      continue;
    }
    if (line.rfind("k,", 0) == 0) continue;
    std::istringstream row(line);
    std::uint64_t k = 0;
    char comma = 0;
    double prob = 0.0;
    if (!(row >> k >> comma >> prob) || comma != ',' || k == 0)
      throw std::invalid_argument("malformed distribution CSV row: '" + line + "'");
    if (pmf.size() < k) pmf.resize(k, 0.0);
    pmf[k - 1] += prob;
  }
  if (pmf.empty()) throw std::invalid_argument("distribution CSV has no rows");
  return ClusterSizeDistribution::from_table(std::move(pmf));
}

}  // namespace percograph::dist
