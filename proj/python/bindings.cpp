#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "percograph/branching.hpp"
#include "percograph/cluster_distribution.hpp"
#include "percograph/errors.hpp"
#include "percograph/experiments.hpp"
#include "percograph/lattice.hpp"
#include "percograph/merged_graph.hpp"
#include "percograph/theory.hpp"

namespace py = pybind11;
using namespace percograph;
using dist::ClusterSizeDistribution;

namespace {

lattice::PercolationConfig sample(int d, int N, double p, std::uint64_t seed,
                                  const std::string& boundary) {
  return lattice::sample_percolation(
      lattice::build_geometry(d, N, lattice::boundary_from_string(boundary)), p, seed);
}

py::dict census(int d, int N, double p, std::uint64_t seed, const std::string& boundary) {
  const auto c = lattice::cluster_census(sample(d, N, p, seed, boundary));
  py::dict counts;
  for (const auto& [k, n] : c.counts) counts[py::int_(k)] = n;
  py::dict out;
  out["counts"] = counts;
  out["n_clusters"] = c.n_clusters;
  out["n_vertices"] = c.n_vertices;
  out["max_size"] = c.max_size;
  return out;
}

py::dict merge(int d, int N, double p, double c, std::uint64_t seed, const std::string& boundary) {
  const auto base = sample(d, N, p, seed, boundary);
  const auto m = merged::overlay_long_range(base, c, seed);
  const auto macro = merged::build_macro_graph(m);
  py::dict out;
  out["K_N"] = base.n_clusters();
  out["C1"] = m.C1();
  out["C2"] = m.C2();
  out["n_long_edges"] = m.long_edges().size();
  out["component_sizes"] = m.component_sizes();
  out["correspondence"] = merged::verify_correspondence(m, macro).ok;
  return out;
}

py::dict theory_point(const ClusterSizeDistribution& law, double c, int d, double p) {
  const auto t = theory::theory_point(law, d, p, c, theory::default_tolerance(law));
  py::dict out;
  out["d"] = t.d;
  out["p"] = t.p;
  out["c"] = t.c;
  out["c_cr"] = t.c_cr;
  out["phase"] = theory::to_string(t.phase);
  out["beta"] = t.beta;
  out["alpha"] = t.alpha;
  out["y_root"] = t.y_root;
  out["z0"] = t.z0;
  out["beta_prime_cr"] = t.beta_prime_cr;
  return out;
}

py::dict survival(std::uint64_t k, double c, const ClusterSizeDistribution& law,
                  std::uint64_t reps, std::uint64_t max_particles, std::uint64_t seed) {
  const auto s = branching::estimate_survival(k, c, law, reps, {max_particles, 10'000}, seed);
  py::dict out;
  out["rho_hat"] = s.rho_hat;
  out["standard_error"] = s.standard_error;
  out["ci_lo"] = s.ci_lo;
  out["ci_hi"] = s.ci_hi;
  out["ambiguous_fraction"] = s.ambiguous_fraction;
  return out;
}

std::string sweep_csv(const std::string& config_json) {
  const auto config = experiments::parse_config(nlohmann::json::parse(config_json));
  const auto result = experiments::sweep(config);
  std::ostringstream out;
  experiments::write_summary_csv(out, result.cells, "python sweep_csv");
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_percograph, m) {
  m.doc() = "Bond percolation with Erdos-Renyi long-range edges";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<experiments::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ClusterSizeDistribution>(m, "ClusterSizeDistribution")
      .def_static("exact_d1", &ClusterSizeDistribution::exact_d1, py::arg("p"))
      .def_static("point_mass", &ClusterSizeDistribution::point_mass)
      .def_static("from_table", &ClusterSizeDistribution::from_table, py::arg("pmf"),
                  "pmf[i] = P{|C| = i + 1}")
      .def("pmf", &ClusterSizeDistribution::pmf, py::arg("k"))
      .def("mass_above", &ClusterSizeDistribution::mass_above, py::arg("k"))
      .def("mean", &ClusterSizeDistribution::mean)
      .def("second_moment", &ClusterSizeDistribution::second_moment)
      .def("kappa", &ClusterSizeDistribution::kappa)
      .def_property_readonly("zeta_hat", &ClusterSizeDistribution::zeta_hat)
      .def_property_readonly("k_max", &ClusterSizeDistribution::k_max)
      .def_property_readonly("kind", [](const ClusterSizeDistribution& d) { return dist::to_string(d.kind()); });

  m.def("c_critical", &theory::c_critical, py::arg("dist"));
  m.def("p_critical_d1", &theory::p_critical_d1, py::arg("c"));
  m.def("classify", [](const ClusterSizeDistribution& d, double c) {
    return theory::to_string(theory::classify(d, c));
  }, py::arg("dist"), py::arg("c"));
  m.def("solve_beta", [](const ClusterSizeDistribution& d, double c, std::optional<double> tol) {
    return theory::solve_beta(d, c, tol.value_or(theory::default_tolerance(d)));
  }, py::arg("dist"), py::arg("c"), py::arg("tol") = py::none());
  m.def("solve_alpha", [](const ClusterSizeDistribution& d, double c, std::optional<double> tol) {
    const auto a = theory::solve_alpha(d, c, tol.value_or(theory::default_tolerance(d)));
    return py::dict(py::arg("alpha") = a.alpha, py::arg("y_root") = a.y_root,
                    py::arg("z0") = a.z0, py::arg("residual") = a.residual);
  }, py::arg("dist"), py::arg("c"), py::arg("tol") = py::none());
  m.def("solve_A_z", [](const ClusterSizeDistribution& d, double c, double z) {
    const auto r = theory::solve_A_z(d, c, z);
    return py::dict(py::arg("converged") = r.converged, py::arg("value") = r.value,
                    py::arg("reason") = r.reason);
  }, py::arg("dist"), py::arg("c"), py::arg("z"));
  m.def("rho_of_type", &theory::rho_of_type, py::arg("x"), py::arg("c"), py::arg("beta"));
  m.def("beta_derivative_at_cr", &theory::beta_derivative_at_cr, py::arg("dist"));
  m.def("theory_point", &theory_point, py::arg("dist"), py::arg("c"), py::arg("d") = 1,
        py::arg("p") = 0.0);

  m.def("census", &census, py::arg("d"), py::arg("N"), py::arg("p"), py::arg("seed") = 1,
        py::arg("boundary") = "torus");
  m.def("origin_cluster_size", [](int d, int N, double p, std::uint64_t seed, const std::string& b) {
    return lattice::origin_cluster_size(sample(d, N, p, seed, b));
  }, py::arg("d"), py::arg("N"), py::arg("p"), py::arg("seed") = 1, py::arg("boundary") = "torus");
  m.def("merge", &merge, py::arg("d"), py::arg("N"), py::arg("p"), py::arg("c"),
        py::arg("seed") = 1, py::arg("boundary") = "torus");
  m.def("estimate_survival", &survival, py::arg("k"), py::arg("c"), py::arg("dist"),
        py::arg("reps") = 10'000, py::arg("max_particles") = 10'000, py::arg("seed") = 1);
  m.def("sweep_csv", &sweep_csv, py::arg("config_json"),
        "Run an experiment config (JSON text) and return the summary CSV.");
}
