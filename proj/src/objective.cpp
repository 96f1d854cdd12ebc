#include "fraclp/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclp {

namespace {

double reaction_value(ReactionKind kind, double y) {
  return kind == ReactionKind::cubic ? y * y * y - y : 0.0;
}

double reaction_slope(ReactionKind kind, double y) {
  return kind == ReactionKind::cubic ? 3.0 * y * y - 1.0 : 0.0;
}

}  // namespace

ObjectiveProblem ObjectiveProblem::tracking(const Grid& grid, GridFunction z) {
  require_match(grid, z);
  ObjectiveProblem p;
  p.kind_ = ObjectiveKind::tracking;
  p.grid_ = grid;
  p.z_ = std::move(z);
  return p;
}

ObjectiveProblem ObjectiveProblem::tracking(const Grid& grid, GridFunction z,
                                            Eigen::MatrixXd K) {
  if (K.rows() != grid.size() || K.cols() != grid.size())
    throw std::invalid_argument("tracking: K must be n x n");
  ObjectiveProblem p = tracking(grid, std::move(z));
  p.K_ = std::move(K);
  return p;
}

ObjectiveProblem ObjectiveProblem::heat_source(const Grid& grid, GridFunction z,
                                               double diffusivity,
                                               ReactionKind reaction,
                                               GridFunction y0, double horizon,
                                               int nt) {
  return heat_source(grid, std::move(z),
                     GridFunction::Constant(grid.size(), diffusivity), reaction,
                     std::move(y0), horizon, nt);
}

ObjectiveProblem ObjectiveProblem::heat_source(const Grid& grid, GridFunction z,
                                               GridFunction diffusivity,
                                               ReactionKind reaction,
                                               GridFunction y0, double horizon,
                                               int nt) {
  if (grid.dim != 1)
    throw std::invalid_argument("heat_source: 1-D grids only");
  require_match(grid, z);
  require_match(grid, diffusivity);
  require_match(grid, y0);
  if ((diffusivity.array() <= 0.0).any())
    throw std::invalid_argument("heat_source: diffusivity must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("heat_source: T must be > 0");
  if (nt < 1) throw std::invalid_argument("heat_source: nt must be >= 1");

  ObjectiveProblem p;
  p.kind_ = ObjectiveKind::heat_source;
  p.grid_ = grid;
  p.z_ = std::move(z);
  p.reaction_ = reaction;
  p.y0_ = std::move(y0);
  p.horizon_ = horizon;
  p.nt_ = nt;
  p.dt_ = horizon / nt;

  // face diffusivities a_{i+1/2}, nodal values replicated to the boundary
  const int n = grid.size();
  const double h = grid.h[0];
  Eigen::VectorXd face(n + 1);
  face[0] = diffusivity[0];
  for (int i = 1; i < n; ++i) face[i] = 0.5 * (diffusivity[i - 1] + diffusivity[i]);
  face[n] = diffusivity[n - 1];

  // I + dt L_a, L_a = 3-point -div(a grad .), zero Dirichlet
  const double r = p.dt_ / (h * h);
  Eigen::VectorXd diag(n);
  p.tri_lower_.resize(n);  // entry i couples node i with node i-1
  p.tri_upper_.resize(n);  // entry i couples node i with node i+1
  for (int i = 0; i < n; ++i) {
    diag[i] = 1.0 + r * (face[i] + face[i + 1]);
    p.tri_lower_[i] = (i > 0) ? -r * face[i] : 0.0;
    p.tri_upper_[i] = (i + 1 < n) ? -r * face[i + 1] : 0.0;
  }

  // Thomas factorization (matrix is constant in time)
  p.fac_diag_.resize(n);
  p.fac_mult_.resize(n);
  p.fac_diag_[0] = diag[0];
  p.fac_mult_[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    p.fac_mult_[i] = p.tri_lower_[i] / p.fac_diag_[i - 1];
    p.fac_diag_[i] = diag[i] - p.fac_mult_[i] * p.tri_upper_[i - 1];
  }
  return p;
}

GridFunction ObjectiveProblem::solve_step(const GridFunction& rhs) const {
  const int n = grid_.size();
  GridFunction x(n);
  x[0] = rhs[0];
  for (int i = 1; i < n; ++i) x[i] = rhs[i] - fac_mult_[i] * x[i - 1];
  x[n - 1] /= fac_diag_[n - 1];
  for (int i = n - 2; i >= 0; --i)
    x[i] = (x[i] - tri_upper_[i] * x[i + 1]) / fac_diag_[i];
  return x;
}

HeatTrajectory ObjectiveProblem::heat_forward(const GridFunction& u) const {
  if (kind_ != ObjectiveKind::heat_source)
    throw std::logic_error("heat_forward: not a heat_source problem");
  require_match(grid_, u);
  HeatTrajectory traj;
  traj.dt = dt_;
  traj.states.reserve(nt_ + 1);
  traj.states.push_back(y0_ + u);
  for (int m = 0; m < nt_; ++m) {
    const GridFunction& y = traj.states.back();
    GridFunction rhs = y;
    if (reaction_ == ReactionKind::cubic)
      for (int i = 0; i < rhs.size(); ++i)
        rhs[i] -= dt_ * reaction_value(reaction_, y[i]);
    traj.states.push_back(solve_step(rhs));
  }
  return traj;
}

GridFunction ObjectiveProblem::heat_adjoint(const HeatTrajectory& traj) const {
  if (kind_ != ObjectiveKind::heat_source)
    throw std::logic_error("heat_adjoint: not a heat_source problem");
  if (static_cast<int>(traj.states.size()) != nt_ + 1)
    throw std::invalid_argument("heat_adjoint: trajectory does not match nt");
  for (const auto& y : traj.states) require_match(grid_, y);

  GridFunction q = traj.states.back() - z_;
  for (int m = nt_ - 1; m >= 0; --m) {
    q = solve_step(q);  // L_a symmetric: the transposed step reuses the factorization
    if (reaction_ == ReactionKind::cubic) {
      const GridFunction& y = traj.states[m];
      for (int i = 0; i < q.size(); ++i)
        q[i] *= 1.0 - dt_ * reaction_slope(reaction_, y[i]);
    }
  }
  return q;
}

double ObjectiveProblem::eval(const GridFunction& u) const {
  require_match(grid_, u);
  const double w = grid_.cell_weight();
  if (kind_ == ObjectiveKind::tracking) {
    if (K_.size() == 0) return 0.5 * w * (u - z_).squaredNorm();
    return 0.5 * w * (K_ * u - z_).squaredNorm();
  }
  const HeatTrajectory traj = heat_forward(u);
  return 0.5 * w * (traj.states.back() - z_).squaredNorm();
}

GridFunction ObjectiveProblem::grad(const GridFunction& u) const {
  require_match(grid_, u);
  if (kind_ == ObjectiveKind::tracking) {
    if (K_.size() == 0) return u - z_;
    return K_.transpose() * (K_ * u - z_);
  }
  return heat_adjoint(heat_forward(u));
}

}  // namespace fraclp
