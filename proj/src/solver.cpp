#include "fraclp/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fraclp {

namespace {

GridFunction subproblem_weights(const GridFunction& u_k, double eps_k,
                                const SolverConfig& cfg) {
  const PsiParams params{cfg.p, eps_k};
  GridFunction w(u_k.size());
  for (Eigen::Index i = 0; i < u_k.size(); ++i)
    w[i] = 2.0 * cfg.beta_reg * psi_prime(params, u_k[i] * u_k[i]);
  // eps^{p-2} overflows once the schedule drives eps below ~1e-206 (p = 1/2);
  // possible only with eps_min = 0 and a large iteration budget
  if (!w.allFinite())
    throw std::runtime_error(
        "subproblem weights overflowed: eps_k = " + std::to_string(eps_k) +
        " is too small for psi'(0) = (p/2) eps^{p-2}; raise eps_min");
  return w;
}

StationarityReport stationarity_impl(const GridFunction& u_k,
                                     const GridFunction& u_next, double eps_k,
                                     const SolverConfig& cfg,
                                     const FracOperator& op,
                                     const GridFunction& grad_next) {
  const Grid& grid = op.grid();
  const PsiParams params{cfg.p, eps_k};
  StationarityReport rep;
  rep.lambda.resize(u_next.size());
  for (Eigen::Index i = 0; i < u_next.size(); ++i)
    rep.lambda[i] = 2.0 * psi_prime(params, u_k[i] * u_k[i]) * u_next[i];

  const double wc = grid.cell_weight();
  const GridFunction r = cfg.alpha * wc * op.apply(u_next) +
                         cfg.beta_reg * wc * rep.lambda + wc * grad_next;
  const GridFunction ainv_r =
      op.solve_shifted(1.0, GridFunction::Zero(r.size()), r, cfg.tol_cg);
  rep.residual_norm = std::sqrt(std::max(0.0, r.dot(ainv_r)));
  rep.pairing_gap =
      wc * rep.lambda.dot(u_next) - cfg.p * lp_pseudonorm(grid, u_next, cfg.p);
  return rep;
}

BacktrackResult backtrack_impl(const GridFunction& u_k, double eps_k,
                               const SolverConfig& cfg, const FracOperator& op,
                               const ObjectiveProblem& prob,
                               const GridFunction& grad_uk, double f_uk) {
  const double wc = op.grid().cell_weight();
  BacktrackResult res;
  double L = 0.0;
  for (int trial = 0; trial < cfg.bt_max_trials; ++trial) {
    GridFunction u_next = subproblem_solve(u_k, eps_k, L, cfg, op, grad_uk);
    const GridFunction delta = u_next - u_k;
    const double f_next = prob.eval(u_next);
    const double linear = wc * grad_uk.dot(delta);
    const double quad = L * op.inner(delta, delta);
    // tiny slack absorbs roundoff when the step collapses to zero
    const double slack =
        10.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f_uk));
    if (f_next <= f_uk + linear + quad + slack) {
      res.L_k = L;
      res.u_next = std::move(u_next);
      res.trials = trial + 1;
      return res;
    }
    L = (L == 0.0) ? cfg.L_tilde : L * cfg.bt_growth;
  }
  throw std::runtime_error(
      "backtrack: no admissible L within " + std::to_string(cfg.bt_max_trials) +
      " trials (last L = " + std::to_string(L / cfg.bt_growth) +
      "); F' may violate the local Lipschitz assumption at this iterate");
}

}  // namespace

void SolverConfig::validate() const {
  std::string err;
  auto check = [&err](bool ok, const char* msg) {
    if (!ok) {
      err += err.empty() ? "" : "; ";
      err += msg;
    }
  };
  check(alpha > 0.0, "alpha must be > 0");
  check(beta_reg >= 0.0, "beta_reg must be >= 0");
  check(p > 0.0 && p < 1.0, "p must lie in (0,1)");
  check(eps0 > 0.0, "eps0 must be > 0");
  check(eps_decay > 0.0 && eps_decay <= 1.0, "eps_decay must lie in (0,1]");
  check(eps_min >= 0.0, "eps_min must be >= 0");
  check(L_tilde > 0.0, "L_tilde must be > 0");
  check(bt_growth > 1.0, "bt_growth must be > 1");
  check(max_outer >= 1, "max_outer must be >= 1");
  check(bt_max_trials >= 1, "bt_max_trials must be >= 1");
  check(tol_step > 0.0, "tol_step must be > 0");
  check(tol_cg > 0.0, "tol_cg must be > 0");
  if (!err.empty()) throw std::invalid_argument("solver config: " + err);
}

double phi_value(const GridFunction& u, double eps, const SolverConfig& cfg,
                 const FracOperator& op, const ObjectiveProblem& prob) {
  if (!(eps >= 0.0)) throw std::invalid_argument("phi: eps must be >= 0");
  return prob.eval(u) + 0.5 * cfg.alpha * op.inner(u, u) +
         cfg.beta_reg * g_eps(op.grid(), u, PsiParams{cfg.p, eps});
}

GridFunction subproblem_solve(const GridFunction& u_k, double eps_k, double L,
                              const SolverConfig& cfg, const FracOperator& op,
                              const GridFunction& grad_uk) {
  if (!(eps_k > 0.0))
    throw std::invalid_argument("subproblem_solve: eps_k must be > 0");
  if (!(L >= 0.0)) throw std::invalid_argument("subproblem_solve: L must be >= 0");
  const double wc = op.grid().cell_weight();
  GridFunction rhs = -wc * grad_uk;
  if (L > 0.0) rhs += L * wc * op.apply(u_k);
  const GridFunction w = subproblem_weights(u_k, eps_k, cfg);
  return op.solve_shifted(cfg.alpha + L, w, rhs, cfg.tol_cg);
}

GridFunction subproblem_solve(const GridFunction& u_k, double eps_k, double L,
                              const SolverConfig& cfg, const FracOperator& op,
                              const ObjectiveProblem& prob) {
  return subproblem_solve(u_k, eps_k, L, cfg, op, prob.grad(u_k));
}

BacktrackResult backtrack(const GridFunction& u_k, double eps_k,
                          const SolverConfig& cfg, const FracOperator& op,
                          const ObjectiveProblem& prob) {
  return backtrack_impl(u_k, eps_k, cfg, op, prob, prob.grad(u_k),
                        prob.eval(u_k));
}

StationarityReport stationarity_report(const GridFunction& u_k,
                                       const GridFunction& u_next, double eps_k,
                                       const SolverConfig& cfg,
                                       const FracOperator& op,
                                       const ObjectiveProblem& prob) {
  return stationarity_impl(u_k, u_next, eps_k, cfg, op, prob.grad(u_next));
}

RunResult run(const SolverConfig& cfg, const FracOperator& op,
              const ObjectiveProblem& prob, const GridFunction& u0) {
  cfg.validate();
  require_match(op.grid(), u0);
  const Grid& grid = op.grid();
  const double wc = grid.cell_weight();

  RunResult res;
  res.u = u0;
  double eps = cfg.eps0;
  GridFunction grad_cur = prob.grad(res.u);
  double f_cur = prob.eval(res.u);

  // the smoothing schedule only enters through beta_reg * G_eps, so the
  // degenerate beta_reg = 0 runs may stop before eps bottoms out
  const bool eps_relevant = cfg.beta_reg > 0.0;

  for (int k = 0; k < cfg.max_outer; ++k) {
    const bool eps_bottomed =
        !eps_relevant || eps <= cfg.eps_min * (1.0 + 1e-12);
    IterationRecord rec;
    rec.k = k;
    rec.eps_k = eps;
    rec.phi = f_cur + 0.5 * cfg.alpha * op.inner(res.u, res.u) +
              cfg.beta_reg * g_eps(grid, res.u, PsiParams{cfg.p, eps});

    BacktrackResult bt;
    try {
      bt = backtrack_impl(res.u, eps, cfg, op, prob, grad_cur, f_cur);
      rec.L_k = bt.L_k;
      rec.bt_trials = bt.trials;

      const GridFunction delta = bt.u_next - res.u;
      rec.step_V = std::sqrt(std::max(0.0, op.inner(delta, delta)));

      const PsiParams params{cfg.p, eps};
      double wterm = 0.0;
      int support = 0;
      for (Eigen::Index i = 0; i < delta.size(); ++i) {
        wterm += psi_prime(params, res.u[i] * res.u[i]) * delta[i] * delta[i];
        if (std::abs(bt.u_next[i]) > eps) ++support;
      }
      rec.descent_weight = cfg.beta_reg * wc * wterm;
      rec.support_fraction = static_cast<double>(support) / grid.size();

      const PairingBound pb = pairing_bound(grid, bt.u_next, params);
      rec.pairing_lower = pb.lower;
      rec.pairing_upper = pb.upper;

      const GridFunction grad_next = prob.grad(bt.u_next);
      res.report = stationarity_impl(res.u, bt.u_next, eps, cfg, op, grad_next);
      rec.stationarity_residual = res.report.residual_norm;

      const double eps_next = std::max(cfg.eps_min, cfg.eps_decay * eps);
      f_cur = prob.eval(bt.u_next);
      rec.phi_next = f_cur + 0.5 * cfg.alpha * op.inner(bt.u_next, bt.u_next) +
                     cfg.beta_reg * g_eps(grid, bt.u_next, PsiParams{cfg.p, eps_next});

      res.records.push_back(rec);
      res.u = std::move(bt.u_next);
      grad_cur = grad_next;
      eps = eps_next;
    } catch (const std::exception& e) {
      // records up to the failing step stay available to the caller
      res.status = RunStatus::failed;
      res.message = e.what();
      return res;
    }

    // a small step only counts as convergence once the smoothing schedule
    // has bottomed out; a bitwise-zero step is an exact fixed point of the
    // surrogate map and stops immediately
    if (rec.step_V <= cfg.tol_step && (eps_bottomed || rec.step_V == 0.0)) {
      res.status = RunStatus::converged;
      return res;
    }
  }
  res.status = RunStatus::max_outer_reached;
  return res;
}

}  // namespace fraclp
