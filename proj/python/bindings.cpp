#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oplog/acceptance.hpp"
#include "oplog/applications.hpp"
#include "oplog/commands.hpp"
#include "oplog/families.hpp"
#include "oplog/funcalc.hpp"
#include "oplog/logrep.hpp"

namespace py = pybind11;
using namespace oplog;
using Dense = OperatorMatrix::Dense;

namespace {

Dense dense(const OperatorMatrix& m) { return m.dense(); }
OperatorMatrix op(const Dense& d) { return OperatorMatrix(d); }

Representation representation(const std::string& name) {
  for (Representation r : kAllRepresentations)
    if (to_string(r) == name) return r;
  throw Error(ErrorKind::InvalidInput, "unknown representation '" + name + "'");
}

ShiftParams shift_params(const EvolutionFamily& fam, double t, double s, std::optional<Complex> eta,
                         std::optional<Complex> nu, bool collapse) {
  if (!eta && !nu) return collapse ? select_collapse_params(fam, t, s) : select_params(fam, t, s);
  if (!eta) throw Error(ErrorKind::InvalidInput, "nu needs eta");
  const OperatorMatrix u = fam(t, s);
  const Complex n = nu ? *nu : (collapse ? nu_from_eta(*eta) : select_nu(u, *eta));
  return certify_params(u, *eta, n);
}

py::dict shift_dict(const ShiftParams& p) {
  py::dict d;
  d["eta"] = p.eta;
  d["nu"] = p.nu;
  d["certified"] = p.certified();
  return d;
}

py::object optional_dense(const std::optional<OperatorMatrix>& m) {
  return m ? py::cast(m->dense()) : py::none();
}

py::object error_name(const std::optional<ErrorKind>& k) {
  return k ? py::cast(std::string(to_string(*k))) : py::none();
}

GridFunction grid(const Eigen::VectorXcd& values, double length) { return GridFunction(length, values); }

ColeHopfConvention convention(const std::string& name) {
  if (name == "paper") return ColeHopfConvention::Paper;
  if (name == "classical") return ColeHopfConvention::Classical;
  throw Error(ErrorKind::InvalidInput, "convention must be 'paper' or 'classical'");
}

}  // namespace

PYBIND11_MODULE(_oplog, m) {
  m.doc() = "Contour-integral operator logarithms and generator recovery";

  static py::exception<Error> oplog_error(m, "OplogError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(oplog_error.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(oplog_error.ptr(), exc.ptr());
    }
  });

  // Matrices cross the boundary as complex NumPy arrays.
  m.def("op_log", [](const Dense& a) { return dense(op_log(op(a))); }, py::arg("a"),
        "Principal logarithm by trapezoidal Riesz-Dunford integration on one circle.");
  m.def("op_log_split", [](const Dense& a) { return dense(op_log_split(op(a))); }, py::arg("a"),
        "Principal logarithm with one circle per spectral cluster.");
  m.def("mat_exp", [](const Dense& a) { return dense(mat_exp(op(a))); }, py::arg("a"));
  m.def("eigen_log", [](const Dense& a) { return dense(eigen_log(op(a))); }, py::arg("a"),
        "Reference logarithm through an eigendecomposition.");

  m.def("resolvent_approx", [](const Dense& u, Complex eta) { return dense(resolvent_approx(op(u), eta)); },
        py::arg("u"), py::arg("eta"));
  m.def("select_eta", [](const Dense& u) { return select_eta(op(u)); }, py::arg("u"));
  m.def("nu_from_eta", &nu_from_eta, py::arg("eta"));
  m.def("select_nu", [](const Dense& u, Complex eta) { return select_nu(op(u), eta); }, py::arg("u"),
        py::arg("eta"));

  py::class_<EvolutionFamily>(m, "Family")
      .def(py::init([](const std::string& spec) { return parse_family(spec); }), py::arg("spec"))
      .def_readonly("name", &EvolutionFamily::name)
      .def_readonly("dim", &EvolutionFamily::dim)
      .def_readonly("commuting", &EvolutionFamily::commuting)
      .def_readonly("invertible", &EvolutionFamily::invertible)
      .def("__call__", [](const EvolutionFamily& f, double t, double s) { return dense(f(t, s)); }, py::arg("t"),
           py::arg("s"))
      .def("invertible_at", &EvolutionFamily::invertible_at, py::arg("t"), py::arg("s"))
      .def("generator_oracle",
           [](const EvolutionFamily& f, double t) -> py::object {
             return f.has_oracle() ? py::cast(f.generator_oracle(t).dense()) : py::none();
           },
           py::arg("t"))
      .def("__repr__", [](const EvolutionFamily& f) { return "<Family " + f.name + ">"; });

  m.def("families",
        [] {
          py::list out;
          for (const auto& e : family_catalogue()) {
            py::dict d;
            d["kind"] = e.kind;
            d["example"] = e.example;
            d["description"] = e.description;
            out.append(d);
          }
          return out;
        },
        "Catalogue of family kinds with an example spec each.");

  m.def(
      "generator",
      [](const std::string& rep, const EvolutionFamily& fam, double t, double s, std::optional<Complex> eta,
         std::optional<Complex> nu) {
        const Representation r = representation(rep);
        const bool collapse = r == Representation::Corollary1 || r == Representation::Corollary2;
        return dense(generator(r, fam, t, s, shift_params(fam, t, s, eta, nu, collapse)));
      },
      py::arg("representation"), py::arg("family"), py::arg("t"), py::arg("s"), py::arg("eta") = py::none(),
      py::arg("nu") = py::none(),
      "Generator A(t) from one representation: lemma1, corollary1, theorem1 or corollary2.");

  m.def(
      "generator_report",
      [](const EvolutionFamily& fam, double t, double s, std::optional<Complex> eta, std::optional<Complex> nu,
         bool collapse) {
        const ShiftParams p = shift_params(fam, t, s, eta, nu, collapse);
        const auto rep = generator_report(fam, t, s, p);
        py::dict values, errors, oracle_errors, pairs;
        for (const auto& [r, out] : rep.outcomes) {
          values[py::str(to_string(r))] = optional_dense(out.value);
          errors[py::str(to_string(r))] = error_name(out.error);
        }
        for (const auto& [r, e] : rep.oracle_errors) oracle_errors[py::str(to_string(r))] = e;
        for (const auto& [pr, d] : rep.pairwise_discrepancies)
          pairs[py::make_tuple(to_string(pr.first), to_string(pr.second))] = d;
        py::dict d;
        d["shift"] = shift_dict(p);
        d["h0"] = rep.h0;
        d["values"] = values;
        d["errors"] = errors;
        d["oracle"] = optional_dense(rep.oracle);
        d["oracle_errors"] = oracle_errors;
        d["pairwise_discrepancies"] = pairs;
        return d;
      },
      py::arg("family"), py::arg("t"), py::arg("s"), py::arg("eta") = py::none(), py::arg("nu") = py::none(),
      py::arg("collapse") = true);

  m.def(
      "formal_log",
      [](const Dense& u, Complex eta) {
        const auto rec = formal_log_decomposition(op(u), eta);
        py::dict d;
        d["log_u_ieta"] = optional_dense(rec.log_u_ieta.value);
        d["log_u_ieta_error"] = error_name(rec.log_u_ieta.error);
        d["log_ieta"] = optional_dense(rec.log_ieta.value);
        d["log_ieta_error"] = error_name(rec.log_ieta.error);
        d["log_u"] = optional_dense(rec.log_u.value);
        d["log_u_error"] = error_name(rec.log_u.error);
        d["discrepancy"] = rec.discrepancy ? py::cast(*rec.discrepancy) : py::none();
        return d;
      },
      py::arg("u"), py::arg("eta"));

  m.def("heat_front", [](int n, double length, double x0) { return heat_front(n, length, x0).values; },
        py::arg("n"), py::arg("length") = 1.0, py::arg("x0") = 0.5);
  m.def(
      "heat_evolve",
      [](const Eigen::VectorXcd& phi0, double length, double mu, double t) {
        return heat_evolve(grid(phi0, length), mu, t).values;
      },
      py::arg("phi0"), py::arg("length"), py::arg("mu"), py::arg("t"));
  m.def(
      "cole_hopf_transform",
      [](const Eigen::VectorXcd& phi, double length, double mu, const std::string& conv) {
        return cole_hopf_transform(grid(phi, length), mu, convention(conv)).values;
      },
      py::arg("phi"), py::arg("length"), py::arg("mu"), py::arg("convention") = "classical");
  m.def(
      "cole_hopf_report",
      [](const Eigen::VectorXcd& phi0, double length, double mu, double t, const std::string& conv) {
        const auto r = cole_hopf_report(grid(phi0, length), mu, t, convention(conv));
        py::dict d;
        d["t"] = r.t;
        d["mu"] = r.mu;
        d["identity_residual"] = r.identity_residual;
        d["burgers_residual"] = r.burgers_residual;
        d["heat_residual"] = r.heat_residual;
        return d;
      },
      py::arg("phi0"), py::arg("length"), py::arg("mu"), py::arg("t"), py::arg("convention") = "classical");

  m.def(
      "strip_double_log",
      [](const Dense& u) {
        const auto r = strip_double_log(op(u));
        py::dict d;
        d["inner"] = r.inner.dense();
        d["outer"] = r.outer.dense();
        d["inner_split"] = r.inner_split;
        d["outer_split"] = r.outer_split;
        d["round_trip"] = r.round_trip;
        return d;
      },
      py::arg("u"));

  m.def(
      "_run_command",
      [](const std::string& command, std::optional<std::string> family, std::optional<std::string> matrix, double t,
         double s, std::optional<Complex> eta, std::optional<Complex> nu, std::uint64_t seed,
         std::optional<double> tolerance) {
        RunConfig cfg;
        cfg.command = command;
        cfg.family_spec = family;
        if (matrix) cfg.matrix_path = *matrix;
        cfg.t = t;
        cfg.s = s;
        cfg.eta = eta;
        cfg.nu = nu;
        cfg.seed = seed;
        cfg.tolerance = tolerance;
        py::gil_scoped_release release;
        return run_command(cfg).to_json().dump();
      },
      py::arg("command"), py::arg("family") = py::none(), py::arg("matrix") = py::none(), py::arg("t") = 1.0,
      py::arg("s") = 0.0, py::arg("eta") = py::none(), py::arg("nu") = py::none(), py::arg("seed") = 7,
      py::arg("tolerance") = py::none());
}
