#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gfi/identities.hpp"
#include "gfi/ke_solver.hpp"
#include "gfi/stability.hpp"
#include "gfi/suite.hpp"

namespace py = pybind11;
using namespace gfi;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict identity_dict(const IdentityReport& r) {
  py::dict d;
  d["lhs"] = r.lhs;
  d["rhs"] = r.rhs;
  d["residual"] = r.residual;
  py::dict terms;
  for (const auto& [k, v] : r.terms) terms[py::str(k)] = v;
  d["terms"] = terms;
  return d;
}

py::dict deficit_dict(const DeficitReport& r) {
  py::dict d;
  d["ent"] = r.functionals.ent;
  d["fisher"] = r.functionals.fisher;
  d["cross"] = r.functionals.cross;
  d["cp"] = r.functionals.cp.value;
  d["cp_provenance"] = to_string(r.functionals.cp.provenance);
  d["w2_to_gamma"] = r.w2_to_gamma;
  d["w11_to_gamma"] = r.w11_to_gamma;
  d["lsi_deficit"] = r.lsi_deficit;
  d["tal_deficit"] = r.tal_deficit;
  d["hwi_gap"] = r.hwi_gap;
  d["centered"] = r.centered;
  py::dict bounds;
  for (const auto& b : r.bounds) {
    py::dict e;
    e["deficit"] = b.deficit;
    e["bound"] = b.bound;
    e["margin"] = b.margin;
    e["status"] = to_string(b.status);
    e["reason"] = b.reason;
    bounds[py::str(b.name)] = e;
  }
  d["bounds"] = bounds;
  return d;
}

py::list rows(const SuiteReport& r) {
  py::list out;
  for (const auto& x : r.rows) {
    py::dict d;
    d["density_id"] = x.density_id;
    d["check"] = x.check;
    d["lhs"] = x.lhs;
    d["rhs"] = x.rhs;
    d["margin"] = x.margin;
    d["status"] = to_string(x.status);
    d["tolerance"] = x.tolerance;
    d["provenance"] = x.provenance;
    d["reason"] = x.reason;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian functional inequalities: deficits, identities and the moment-measure solver";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<RelativeDensity>(m, "RelativeDensity")
      .def_property_readonly("label", &RelativeDensity::label)
      .def_property_readonly("compact", &RelativeDensity::compact)
      .def_property_readonly("support",
                             [](const RelativeDensity& g) {
                               return py::make_tuple(g.support().lo, g.support().hi);
                             })
      .def("log_g", &RelativeDensity::log_g, py::arg("x"))
      .def("dlog_g", &RelativeDensity::dlog_g, py::arg("x"))
      .def("cdf", &RelativeDensity::cdf, py::arg("x"))
      .def("quantile", &RelativeDensity::quantile, py::arg("p"))
      .def("mean", &RelativeDensity::mean)
      .def("variance", &RelativeDensity::variance)
      .def("__repr__", [](const RelativeDensity& g) { return "<RelativeDensity " + g.label() + ">"; });

  m.def("scaled_gaussian", &scaled_gaussian, py::arg("lam"));
  m.def("gaussian", &gaussian, py::arg("mean"), py::arg("sigma"));
  m.def(
      "gaussian_mixture",
      [](const std::vector<double>& w, const std::vector<double>& mu, const std::vector<double>& s) {
        return gaussian_mixture(w, mu, s);
      },
      py::arg("weights"), py::arg("means"), py::arg("sigmas"));
  m.def("quartic", &quartic, py::arg("a"), py::arg("tilt") = 0.0);
  m.def("logcosh", &logcosh, py::arg("b"), py::arg("c"), py::arg("tilt") = 0.0);
  m.def("uniform", &uniform, py::arg("lo"), py::arg("hi"));
  m.def("recenter", &recenter, py::arg("g"));
  m.def("standard_corpus", [] {
    py::dict d;
    for (auto& e : standard_corpus()) d[py::str(e.id)] = e.density;
    return d;
  });

  m.def("entropy", [](const RelativeDensity& g) { return entropy(g); }, py::arg("g"));
  m.def("fisher_information", [](const RelativeDensity& g) { return fisher_information(g); },
        py::arg("g"));
  m.def("poincare_constant", [](const RelativeDensity& g) { return poincare_constant(g).value; },
        py::arg("g"));
  m.def("w2_squared", [](const RelativeDensity& a, const RelativeDensity& b) { return w2_squared(a, b); },
        py::arg("mu"), py::arg("nu"));
  m.def("delta", &delta, py::arg("t"));
  m.def(
      "deficit_report",
      [](const RelativeDensity& g, bool lsi_cost) {
        return deficit_dict(deficit_report(g, {.lsi_cost = lsi_cost}));
      },
      py::arg("g"), py::arg("lsi_cost") = true);
  m.def("bochner_identity", [](const RelativeDensity& g) { return identity_dict(bochner_identity(g)); },
        py::arg("g"));
  m.def("cross_identity", [](const RelativeDensity& g) { return identity_dict(cross_identity(g)); },
        py::arg("g"));
  m.def(
      "ent_iden",
      [](const RelativeDensity& g, const RelativeDensity& f) { return identity_dict(ent_iden(g, f)); },
      py::arg("g"), py::arg("f"));

  py::class_<MomentSolution>(m, "MomentSolution")
      .def_property_readonly("x", [](const MomentSolution& s) { return to_array(s.grid.nodes()); })
      .def_property_readonly("phi", [](const MomentSolution& s) { return to_array(s.phi); })
      .def_property_readonly("T", [](const MomentSolution& s) { return to_array(s.T); })
      .def_readonly("pushforward_residual", &MomentSolution::pushforward_residual)
      .def_readonly("mass_error", &MomentSolution::mass_error)
      .def_readonly("barycenter_error", &MomentSolution::barycenter_error)
      .def_readonly("f_gamma", &MomentSolution::f_gamma)
      .def_readonly("iterations", &MomentSolution::iterations)
      .def("phi_at", &MomentSolution::phi_at, py::arg("x"))
      .def("T_at", &MomentSolution::T_at, py::arg("x"))
      .def("to_csv", [](const MomentSolution& s) {
        std::ostringstream out;
        s.write_csv(out);
        return out.str();
      });
  m.def("solve_1d", [](const RelativeDensity& nu) { return solve_1d(nu); }, py::arg("nu"),
        py::call_guard<py::gil_scoped_release>());

  m.def("check_names", [] {
    std::vector<std::string> names;
    for (const auto& c : check_registry()) names.push_back(c.name);
    return names;
  });
  m.def(
      "run_suite",
      [](const std::string& config_json) {
        const SuiteConfig c = parse_config(config_json);
        SuiteReport r;
        {
          py::gil_scoped_release release;
          r = run_suite(c);
        }
        return rows(r);
      },
      py::arg("config_json"));
}
