#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fraclp/experiment.hpp"
#include "fraclp/frac_ops.hpp"
#include "fraclp/grid.hpp"
#include "fraclp/objective.hpp"
#include "fraclp/smoothing.hpp"
#include "fraclp/solver.hpp"

namespace py = pybind11;
using namespace fraclp;

PYBIND11_MODULE(_core, m) {
  m.doc() = "sparse L^p optimization in fractional Sobolev spaces";

  py::class_<Grid>(m, "Grid")
      .def_property_readonly("dim", [](const Grid& g) { return g.dim; })
      .def_property_readonly("n", [](const Grid& g) { return g.n; })
      .def_property_readonly("length", [](const Grid& g) { return g.length; })
      .def_property_readonly("h", [](const Grid& g) { return g.h; })
      .def("size", &Grid::size)
      .def("cell_weight", &Grid::cell_weight)
      .def("quad_measure", &Grid::quad_measure)
      .def("x", &Grid::x);

  m.def("make_interval_grid", &make_interval_grid, py::arg("n"),
        py::arg("length"));
  m.def("make_rectangle_grid", &make_rectangle_grid, py::arg("n1"),
        py::arg("length1"), py::arg("n2"), py::arg("length2"));
  m.def("integrate", &integrate, py::arg("grid"), py::arg("f"));
  m.def("lp_pseudonorm", &lp_pseudonorm, py::arg("grid"), py::arg("u"),
        py::arg("p"));

  py::class_<PsiParams>(m, "PsiParams")
      .def(py::init([](double p, double eps) {
             PsiParams params{p, eps};
             validate(params);
             return params;
           }),
           py::arg("p"), py::arg("eps"))
      .def_readonly("p", &PsiParams::p)
      .def_readonly("eps", &PsiParams::eps);

  m.def("psi", &psi, py::arg("params"), py::arg("t"));
  m.def("psi_prime", &psi_prime, py::arg("params"), py::arg("t"));
  m.def("g_eps", &g_eps, py::arg("grid"), py::arg("u"), py::arg("params"));
  m.def("g_eps_grad", &g_eps_grad, py::arg("grid"), py::arg("u"),
        py::arg("params"));
  m.def(
      "pairing_bound",
      [](const Grid& grid, const GridFunction& u, const PsiParams& params) {
        const PairingBound b = pairing_bound(grid, u, params);
        return std::make_pair(b.lower, b.upper);
      },
      py::arg("grid"), py::arg("u"), py::arg("params"));

  py::enum_<OperatorKind>(m, "OperatorKind")
      .value("spectral", OperatorKind::spectral)
      .value("integral", OperatorKind::integral);

  py::class_<FracOperator>(m, "FracOperator")
      .def_property_readonly("kind", &FracOperator::kind)
      .def_property_readonly("s", &FracOperator::order)
      .def("apply", &FracOperator::apply, py::arg("u"))
      .def("inner", &FracOperator::inner, py::arg("u"), py::arg("v"))
      .def("norm", &FracOperator::norm, py::arg("u"))
      .def("solve_shifted", &FracOperator::solve_shifted, py::arg("c"),
           py::arg("w"), py::arg("rhs"), py::arg("tol") = 1e-10,
           py::arg("max_iter") = 0)
      .def("dense_matrix", &FracOperator::dense_matrix);

  m.def("spectral_operator", &spectral_operator, py::arg("grid"), py::arg("s"));
  m.def("integral_stiffness", &integral_stiffness, py::arg("grid"),
        py::arg("s"), py::arg("max_n") = 512);

  py::enum_<ReactionKind>(m, "ReactionKind")
      .value("zero", ReactionKind::zero)
      .value("cubic", ReactionKind::cubic);

  py::class_<HeatTrajectory>(m, "HeatTrajectory")
      .def_readonly("states", &HeatTrajectory::states)
      .def_readonly("dt", &HeatTrajectory::dt);

  py::class_<ObjectiveProblem>(m, "ObjectiveProblem")
      .def_static("tracking",
                  py::overload_cast<const Grid&, GridFunction>(
                      &ObjectiveProblem::tracking),
                  py::arg("grid"), py::arg("z"))
      .def_static(
          "heat_source",
          py::overload_cast<const Grid&, GridFunction, double, ReactionKind,
                            GridFunction, double, int>(
              &ObjectiveProblem::heat_source),
          py::arg("grid"), py::arg("z"), py::arg("diffusivity"),
          py::arg("reaction"), py::arg("y0"), py::arg("horizon"), py::arg("nt"))
      .def("eval", &ObjectiveProblem::eval, py::arg("u"))
      .def("grad", &ObjectiveProblem::grad, py::arg("u"))
      .def("heat_forward", &ObjectiveProblem::heat_forward, py::arg("u"))
      .def("heat_adjoint", &ObjectiveProblem::heat_adjoint, py::arg("trajectory"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &SolverConfig::alpha)
      .def_readwrite("beta_reg", &SolverConfig::beta_reg)
      .def_readwrite("p", &SolverConfig::p)
      .def_readwrite("eps0", &SolverConfig::eps0)
      .def_readwrite("eps_decay", &SolverConfig::eps_decay)
      .def_readwrite("eps_min", &SolverConfig::eps_min)
      .def_readwrite("L_tilde", &SolverConfig::L_tilde)
      .def_readwrite("bt_growth", &SolverConfig::bt_growth)
      .def_readwrite("max_outer", &SolverConfig::max_outer)
      .def_readwrite("bt_max_trials", &SolverConfig::bt_max_trials)
      .def_readwrite("tol_step", &SolverConfig::tol_step)
      .def_readwrite("tol_cg", &SolverConfig::tol_cg)
      .def("validate", &SolverConfig::validate);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("k", &IterationRecord::k)
      .def_readonly("eps_k", &IterationRecord::eps_k)
      .def_readonly("L_k", &IterationRecord::L_k)
      .def_readonly("bt_trials", &IterationRecord::bt_trials)
      .def_readonly("phi", &IterationRecord::phi)
      .def_readonly("phi_next", &IterationRecord::phi_next)
      .def_readonly("step_V", &IterationRecord::step_V)
      .def_readonly("support_fraction", &IterationRecord::support_fraction)
      .def_readonly("pairing_lower", &IterationRecord::pairing_lower)
      .def_readonly("pairing_upper", &IterationRecord::pairing_upper)
      .def_readonly("descent_weight", &IterationRecord::descent_weight)
      .def_readonly("stationarity_residual",
                    &IterationRecord::stationarity_residual);

  py::class_<StationarityReport>(m, "StationarityReport")
      .def_readonly("lambda_", &StationarityReport::lambda)
      .def_readonly("residual_norm", &StationarityReport::residual_norm)
      .def_readonly("pairing_gap", &StationarityReport::pairing_gap);

  py::enum_<RunStatus>(m, "RunStatus")
      .value("converged", RunStatus::converged)
      .value("max_outer_reached", RunStatus::max_outer_reached)
      .value("failed", RunStatus::failed);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("u", &RunResult::u)
      .def_readonly("records", &RunResult::records)
      .def_readonly("report", &RunResult::report)
      .def_readonly("status", &RunResult::status)
      .def_readonly("message", &RunResult::message);

  m.def("phi_value", &phi_value, py::arg("u"), py::arg("eps"), py::arg("cfg"),
        py::arg("op"), py::arg("prob"));
  m.def("run", &run, py::arg("cfg"), py::arg("op"), py::arg("prob"),
        py::arg("u0"));
  m.def("stationarity_report", &stationarity_report, py::arg("u_k"),
        py::arg("u_next"), py::arg("eps_k"), py::arg("cfg"), py::arg("op"),
        py::arg("prob"));
  m.def("add_gaussian_noise", &add_gaussian_noise, py::arg("z"),
        py::arg("sigma"), py::arg("seed"));
}
