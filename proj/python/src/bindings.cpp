#include "tracefem/config.hpp"
#include "tracefem/linalg.hpp"
#include "tracefem/verification.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace tracefem;

namespace {

// kwargs -> RunConfig through the same key=value parser as the CLI
RunConfig config_from_kwargs(const py::kwargs& kw) {
  RunConfig cfg;
  for (const auto& [key, value] : kw) {
    std::string v;
    if (py::isinstance<py::bool_>(value)) v = value.cast<bool>() ? "true" : "false";
    else v = py::str(value).cast<std::string>();
    cfg.set(key.cast<std::string>(), v);
  }
  cfg.validate();
  return cfg;
}

py::dict stats_dict(const SolverStats& s) {
  py::dict d;
  d["iterations"] = s.iterations;
  d["converged"] = s.converged;
  d["relative_residual"] = s.relative_residual;
  d["residual_history"] = s.residual_history;
  d["inner_A"] = s.inner_A;
  d["inner_S"] = s.inner_S;
  return d;
}

py::dict errors_dict(const ErrorRow& e) {
  py::dict d;
  d["level"] = e.level;
  d["U"] = e.U;
  d["L2P"] = e.L2P;
  d["u_N"] = e.uN;
  d["M"] = e.M;
  return d;
}

Eigen::SparseMatrix<double> csc(const SparseMatrix& m) { return m.to_eigen(); }

}  // namespace

PYBIND11_MODULE(_tracefem, m) {
  m.doc() = "Trace finite elements for the surface vector-Laplace problem";
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<SetupError>(m, "SetupError", PyExc_ValueError);

  m.def(
      "forcing", [](const std::string& name, const Vec3& x) { return forcing(ManufacturedCase::by_name(name), x); },
      py::arg("case"), py::arg("x"), "Right-hand side f at a point on the surface.");
  m.def(
      "exact_velocity",
      [](const std::string& name, const Vec3& x) { return ManufacturedCase::by_name(name).u_exact(x); },
      py::arg("case"), py::arg("x"));
  m.def(
      "exact_multiplier",
      [](const std::string& name, const Vec3& x) { return exact_multiplier(ManufacturedCase::by_name(name), x); },
      py::arg("case"), py::arg("x"));

  py::class_<Discretization, std::unique_ptr<Discretization>>(m, "Discretization")
      .def(py::init([](int level, const py::kwargs& kw) {
             const RunConfig cfg = config_from_kwargs(kw);
             return std::make_unique<Discretization>(ManufacturedCase::by_name(cfg.case_name),
                                                     cfg.discretization(level));
           }),
           py::arg("level") = 1,
           "Keyword options as in the configuration file: case, k, l, alpha, c, normals.")
      .def_property_readonly("h", [](const Discretization& d) { return d.mesh().h; })
      .def_property_readonly("rho", [](const Discretization& d) { return d.params().rho; })
      .def_property_readonly("n_velocity", [](const Discretization& d) { return d.system().n_velocity(); })
      .def_property_readonly("n_multiplier", [](const Discretization& d) { return d.system().n_multiplier(); })
      .def_property_readonly("n_active_tets", [](const Discretization& d) { return d.active().tets.size(); })
      .def_property_readonly("surface_area", [](const Discretization& d) { return d.surface().total_area; })
      .def_property_readonly("A", [](const Discretization& d) { return csc(d.system().A); })
      .def_property_readonly("B", [](const Discretization& d) { return csc(d.system().B); })
      .def_property_readonly("SM", [](const Discretization& d) { return csc(d.system().SM); })
      .def_property_readonly("Mu", [](const Discretization& d) { return csc(d.system().Mu); })
      .def_property_readonly("Mlambda", [](const Discretization& d) { return csc(d.system().Mlambda); })
      .def_property_readonly("saddle_matrix", [](const Discretization& d) { return csc(d.system().full_matrix()); })
      .def_property_readonly("rhs", [](const Discretization& d) { return d.system().rhs(); })
      .def(
          "surface_triangles",
          [](const Discretization& d) {
            const auto& tris = d.surface().triangles;
            Eigen::MatrixXd p(tris.size(), 9);
            for (std::size_t i = 0; i < tris.size(); ++i)
              for (int v = 0; v < 3; ++v) p.row(i).segment<3>(3 * v) = tris[i].points[v].transpose();
            return p;
          },
          "One row per triangle of Gamma_h: x0 y0 z0 x1 y1 z1 x2 y2 z2.")
      .def(
          "solve",
          [](const Discretization& d, const std::string& solver, double rtol, double inner_rtol, int maxit) {
            SaddleSolution s;
            if (solver == "direct") {
              s = direct_solve(d.system());
            } else if (solver == "minres") {
              BlockPreconditioner Q(d.system(), inner_rtol);
              s = minres(d.system(), Q, rtol, maxit);
            } else {
              throw SetupError("solver must be minres or direct");
            }
            return py::make_tuple(s.u, s.lambda, stats_dict(s.stats));
          },
          py::arg("solver") = "minres", py::arg("rtol") = 1e-6, py::arg("inner_rtol") = 1e-4,
          py::arg("maxit") = 2000, "Returns (u, lambda, stats).")
      .def(
          "errors",
          [](const Discretization& d, const Vector& u, const Vector& lambda) {
            return errors_dict(compute_errors(d, u, lambda));
          },
          py::arg("u"), py::arg("lam"))
      .def(
          "condition",
          [](const Discretization& d, const std::string& mode, int dense_limit) {
            if (mode != "none" && mode != "mass-block") throw SetupError("mode must be none or mass-block");
            const ConditionEstimate e = estimate_condition(
                d.system(), mode == "none" ? PrecondMode::none : PrecondMode::mass_block, dense_limit);
            py::dict r;
            r["lambda_min_abs"] = e.lambda_min_abs;
            r["lambda_max_abs"] = e.lambda_max_abs;
            r["cond"] = e.cond;
            r["method"] = e.method;
            r["bound_only"] = e.bound_only;
            return r;
          },
          py::arg("mode") = "mass-block", py::arg("dense_limit") = 3500)
      .def(
          "schur_spectrum", [](const Discretization& d) { return schur_spectrum(d.system()).eigenvalues; },
          "Sorted generalized eigenvalues of (B A^-1 B^T, S_M).");

  m.def(
      "run_study",
      [](const py::kwargs& kw) {
        const RunConfig cfg = config_from_kwargs(kw);
        const StudyResult r = run_convergence_study(cfg);
        py::list rows;
        for (const auto& l : r.levels) {
          py::dict d = errors_dict(l.errors);
          d["level"] = l.level;
          d["h"] = l.h;
          d["ok"] = l.ok;
          d["message"] = l.message;
          d["stats"] = stats_dict(l.stats);
          rows.append(d);
        }
        return rows;
      },
      "Convergence study over levels=a..b; keyword options as in the configuration file.");
}
