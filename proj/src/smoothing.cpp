#include "fraclp/smoothing.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclp {

namespace {

// t^q for t >= 0 via exp(q ln t); exact-zero shortcut avoids pow corner cases
double pow_pos(double t, double q) {
  if (t == 0.0) return 0.0;
  return std::exp(q * std::log(t));
}

}  // namespace

void validate(const PsiParams& params) {
  if (!(params.p > 0.0 && params.p < 1.0))
    throw std::invalid_argument("psi: p must lie in (0,1)");
  if (!(params.eps >= 0.0))
    throw std::invalid_argument("psi: eps must be >= 0");
}

double psi(const PsiParams& params, double t) {
  validate(params);
  if (t < 0.0) throw std::invalid_argument("psi: t must be >= 0");
  const double p = params.p;
  const double eps = params.eps;
  if (eps > 0.0 && t < eps * eps)
    return 0.5 * p * t / pow_pos(eps, 2.0 - p) + (1.0 - 0.5 * p) * pow_pos(eps, p);
  return pow_pos(t, 0.5 * p);
}

double psi_prime(const PsiParams& params, double t) {
  validate(params);
  if (t < 0.0) throw std::invalid_argument("psi_prime: t must be >= 0");
  const double p = params.p;
  const double eps = params.eps;
  if (eps == 0.0) {
    if (t == 0.0)
      throw std::domain_error("psi_prime: unbounded at t = 0 when eps = 0");
    return 0.5 * p * pow_pos(t, 0.5 * (p - 2.0));
  }
  if (t < eps * eps) return 0.5 * p * pow_pos(eps, p - 2.0);
  return 0.5 * p * pow_pos(t, 0.5 * (p - 2.0));
}

double g_eps(const Grid& grid, const GridFunction& u, const PsiParams& params) {
  require_match(grid, u);
  validate(params);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    acc += psi(params, u[i] * u[i]);
  return grid.cell_weight() * acc;
}

GridFunction g_eps_grad(const Grid& grid, const GridFunction& u,
                        const PsiParams& params) {
  require_match(grid, u);
  validate(params);
  if (!(params.eps > 0.0))
    throw std::invalid_argument("g_eps_grad: requires eps > 0");
  GridFunction g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    g[i] = 2.0 * u[i] * psi_prime(params, u[i] * u[i]);
  return g;
}

PairingBound pairing_bound(const Grid& grid, const GridFunction& u,
                           const PsiParams& params) {
  require_match(grid, u);
  validate(params);
  if (!(params.eps > 0.0))
    throw std::invalid_argument("pairing_bound: requires eps > 0");
  const double p = params.p;
  const double eps = params.eps;
  const double eps_w = pow_pos(eps, p - 2.0);
  double lower = 0.0, upper = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    const double ap = pow_pos(a, p);
    upper += ap;
    // min(eps^{p-2}, |u|^{p-2}) u^2: both exponents negative, so the min picks
    // |u|^{p-2} exactly when |u| >= eps
    lower += (a >= eps) ? ap : eps_w * a * a;
  }
  const double w = grid.cell_weight();
  return {p * w * lower, p * w * upper};
}

}  // namespace fraclp
