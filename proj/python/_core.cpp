#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "losslim/analysis.hpp"
#include "losslim/cli.hpp"
#include "losslim/io.hpp"
#include "losslim/lossless.hpp"
#include "losslim/netgen.hpp"
#include "losslim/numlin.hpp"
#include "losslim/svg.hpp"
#include "losslim/swing.hpp"
#include "losslim/synth.hpp"

namespace py = pybind11;
using namespace losslim;

namespace {

const char* kind_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::StructuredH2: return "structured_h2";
    case ControllerKind::StaticHinf: return "static_hinf";
    case ControllerKind::RiccatiH2: return "riccati_h2";
  }
  return "";
}

Metric metric_from_name(const std::string& name) {
  if (name == "h2") return Metric::H2;
  if (name == "hinf") return Metric::Hinf;
  throw py::value_error("metric must be 'h2' or 'hinf'");
}

py::dict gains_to_dict(const GainMatrix& gains) {
  py::dict d;
  d["values"] = gains.values;
  d["metric"] = gains.metric == Metric::H2 ? "h2" : "hinf";
  d["bus_ids"] = gains.bus_ids;
  d["cluster_boundaries"] = gains.cluster_boundaries;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "H2/Hinf performance limits of lossless systems and "
            "swing-equation power grids";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "LosslimError");

  py::class_<StateSpace>(m, "StateSpace")
      .def(py::init<MatrixXd, MatrixXd, MatrixXd, MatrixXd>(), py::arg("A"),
           py::arg("B"), py::arg("C"), py::arg("D"))
      .def_property_readonly("A", &StateSpace::A)
      .def_property_readonly("B", &StateSpace::B)
      .def_property_readonly("C", &StateSpace::C)
      .def_property_readonly("D", &StateSpace::D)
      .def_property_readonly("n", &StateSpace::n)
      .def_property_readonly("m", &StateSpace::m)
      .def_property_readonly("p", &StateSpace::p)
      .def("frequency_response", &StateSpace::frequency_response,
           py::arg("omega"))
      .def("to_json", [](const StateSpace& sys) { return to_json(sys); })
      .def_static("from_json", &statespace_from_json, py::arg("text"));

  py::class_<Controller>(m, "Controller")
      .def_property_readonly("K", [](const Controller& c) { return c.K; })
      .def_property_readonly(
          "kind", [](const Controller& c) { return kind_name(c.kind); });

  py::class_<GeneralizedPlant>(m, "GeneralizedPlant");

  // numlin
  m.def("solve_lyapunov",
        [](const MatrixXd& A, const MatrixXd& Q, double tol) {
          return solve_lyapunov(A, Q, tol);
        },
        py::arg("A"), py::arg("Q"), py::arg("tol") = 1e-9);
  m.def("solve_care",
        [](const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
           double r_inv_scale, double tol) {
          return solve_care(A, B, Q, r_inv_scale, tol);
        },
        py::arg("A"), py::arg("B"), py::arg("Q"), py::arg("r_inv_scale") = 1.0,
        py::arg("tol") = 1e-9);
  m.def("h2_norm", &h2_norm, py::arg("sys"), py::arg("tol") = 1e-9);
  m.def("hinf_norm",
        [](const StateSpace& sys, double tol) {
          HinfOptions opts;
          opts.tol = tol;
          return hinf_norm(sys, opts);
        },
        py::arg("sys"), py::arg("tol") = 1e-6);
  m.def("controllability_rank",
        [](const MatrixXd& A, const MatrixXd& B, double tol) {
          const RankReport r = controllability_rank(A, B, tol);
          return py::make_tuple(r.is_controllable, r.rank);
        },
        py::arg("A"), py::arg("B"), py::arg("tol") = 1e-9);

  // lossless
  m.def("find_certificate",
        [](const StateSpace& sys, double tol) {
          const LosslessCertificate cert = find_certificate(sys, tol);
          py::dict d;
          d["P"] = cert.P;
          d["residual_eq_A"] = cert.residual_eq_A;
          d["residual_eq_B"] = cert.residual_eq_B;
          d["min_eigenvalue"] = cert.min_eigenvalue;
          return d;
        },
        py::arg("sys"), py::arg("tol") = 1e-9);
  m.def("verify_certificate",
        [](const StateSpace& sys, const MatrixXd& P, double tol) {
          const CertificateResiduals r = verify_certificate(sys, P, tol);
          py::dict d;
          d["valid"] = r.valid;
          d["eq_A"] = r.eq_A;
          d["eq_B"] = r.eq_B;
          d["eq_D"] = r.eq_D;
          d["min_eigenvalue"] = r.min_eigenvalue;
          return d;
        },
        py::arg("sys"), py::arg("P"), py::arg("tol") = 1e-9);
  m.def("h2_limit", &h2_limit, py::arg("sys"), py::arg("tol") = 1e-9);
  m.def("hinf_limit", &hinf_limit, py::arg("sys"), py::arg("tol") = 1e-9);

  // synth
  m.def("build_generalized_plant", &build_generalized_plant, py::arg("sys"));
  m.def("loop_shift", &loop_shift, py::arg("plant"));
  m.def("structured_h2_controller", &structured_h2_controller, py::arg("sys"));
  m.def("static_hinf_controller", &static_hinf_controller, py::arg("sys"));
  m.def("riccati_h2_controller", &riccati_h2_controller, py::arg("plant"));
  m.def("close_loop", &close_loop, py::arg("plant"), py::arg("controller"));
  m.def("closed_loop",
        [](const StateSpace& sys, const Controller& K) {
          return close_loop(build_generalized_plant(sys), K);
        },
        py::arg("sys"), py::arg("controller"),
        "Closed loop of the canonical generalized plant of sys with K.");
  m.def("hinf_gamma_feasible",
        [](const StateSpace& sys, double gamma, double tol) {
          const HinfFeasibility f = hinf_gamma_feasible(sys, gamma, tol);
          py::dict d;
          d["feasible"] = f.feasible;
          d["x_exists"] = f.x_exists;
          d["y_exists"] = f.y_exists;
          d["spectral_radius_xy"] = f.spectral_radius_xy;
          return d;
        },
        py::arg("sys"), py::arg("gamma"), py::arg("tol") = 1e-9);

  // swing
  m.def("swing_statespace", &swing_statespace, py::arg("M"), py::arg("L"));
  m.def("factor_reduced", &factor_reduced, py::arg("K_red"),
        py::arg("tol") = 1e-9);
  m.def("h2_limit_swing", &h2_limit_swing, py::arg("M"));
  m.def("swing_model_from_network_json",
        [](const std::string& text) {
          const SwingModel model = build_swing_model(network_from_json(text));
          py::dict d;
          d["M"] = model.M;
          d["L"] = model.L;
          d["sys"] = model.sys;
          d["generator_ids"] = model.generator_ids;
          d["K_red"] = model.K_red;
          return d;
        },
        py::arg("network_json"));
  m.def("lump_network_json",
        [](const std::string& text) {
          return to_json(lump(network_from_json(text)));
        },
        py::arg("network_json"));

  // netgen
  m.def("generate_network_json",
        [](const std::string& config_json) {
          return to_json(generate_network(config_from_json(config_json)));
        },
        py::arg("config_json") = std::string("{}"));
  m.def("eigenvector_centrality", &eigenvector_centrality, py::arg("adjacency"));

  // analysis
  m.def("subblock_gains",
        [](const StateSpace& plant, const Controller& K,
           const std::string& metric, double tol, int threads) {
          GainOptions opts;
          opts.tol = tol;
          opts.threads = threads;
          return gains_to_dict(
              subblock_gains(plant, K, metric_from_name(metric), opts));
        },
        py::arg("plant"), py::arg("controller"), py::arg("metric"),
        py::arg("tol") = 1e-6, py::arg("threads") = 0);
  m.def("network_gains_json",
        [](const std::string& network_json, const std::string& metric,
           double tol, int threads) {
          GainOptions opts;
          opts.tol = tol;
          opts.threads = threads;
          return gains_to_dict(network_gains(network_from_json(network_json),
                                             metric_from_name(metric), opts));
        },
        py::arg("network_json"), py::arg("metric"), py::arg("tol") = 1e-6,
        py::arg("threads") = 0);
  m.def("jensen_report",
        [](const VectorXd& M) {
          const JensenReport r = jensen_report(M);
          py::dict d;
          d["lhs"] = r.lhs;
          d["rhs"] = r.rhs;
          d["gap"] = r.gap;
          d["heterogeneity_index"] = r.heterogeneity_index;
          return d;
        },
        py::arg("M"));
}
