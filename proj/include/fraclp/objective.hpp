#pragma once

#include "fraclp/grid.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fraclp {

enum class ObjectiveKind { tracking, heat_source };
enum class ReactionKind { zero, cubic };  // cubic: f(y) = y^3 - y

/// Forward states of the IMEX heat scheme, y^0 .. y^{nt}.
struct HeatTrajectory {
  std::vector<GridFunction> states;
  double dt = 0.0;
};

/// The smooth term F of the objective, with its L2-Riesz gradient.
///
/// tracking:    F(u) = 1/2 || K u - z ||^2_{L2,lumped},  K identity by default
/// heat_source: F(u) = 1/2 || y^{nt} - z ||^2_{L2,lumped} where y solves the
///              IMEX-discretized heat equation
///                 (I + dt L_a) y^{m+1} = y^m - dt f(y^m),  y^0 = y0 + u,
///              L_a the 3-point discretization of -div(a grad .) with zero
///              Dirichlet boundary. The gradient is the exact transpose of
///              the linearized scheme (discretize-then-optimize), so
///              finite-difference checks pass to solver tolerance.
///
/// Instances are immutable after construction; eval/grad are reentrant and
/// allocate their own trajectories.
class ObjectiveProblem {
 public:
  static ObjectiveProblem tracking(const Grid& grid, GridFunction z);
  static ObjectiveProblem tracking(const Grid& grid, GridFunction z,
                                   Eigen::MatrixXd K);
  /// 1-D only. diffusivity a is nodal (interior nodes, replicated to the
  /// boundary faces) or constant via a uniform vector.
  static ObjectiveProblem heat_source(const Grid& grid, GridFunction z,
                                      GridFunction diffusivity,
                                      ReactionKind reaction, GridFunction y0,
                                      double horizon, int nt);
  static ObjectiveProblem heat_source(const Grid& grid, GridFunction z,
                                      double diffusivity, ReactionKind reaction,
                                      GridFunction y0, double horizon, int nt);

  ObjectiveKind kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  const GridFunction& target() const { return z_; }

  double eval(const GridFunction& u) const;
  GridFunction grad(const GridFunction& u) const;

  /// heat_source only.
  HeatTrajectory heat_forward(const GridFunction& u) const;
  /// Terminal condition y^{nt} - z marched backward through the transposed
  /// linearized scheme; returns the sensitivity w.r.t. the initial
  /// perturbation u.
  GridFunction heat_adjoint(const HeatTrajectory& traj) const;

 private:
  ObjectiveProblem() = default;

  GridFunction solve_step(const GridFunction& rhs) const;  // (I + dt L_a) x = rhs

  ObjectiveKind kind_ = ObjectiveKind::tracking;
  Grid grid_;
  GridFunction z_;
  Eigen::MatrixXd K_;  // empty means identity

  ReactionKind reaction_ = ReactionKind::zero;
  GridFunction y0_;
  double horizon_ = 0.0;
  int nt_ = 0;
  double dt_ = 0.0;
  // tridiagonal factorization of I + dt L_a (Thomas; SPD and diagonally
  // dominant, no pivoting needed)
  Eigen::VectorXd tri_lower_, tri_upper_, fac_diag_, fac_mult_;
};

}  // namespace fraclp
