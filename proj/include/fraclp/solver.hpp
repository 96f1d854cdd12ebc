#pragma once

#include "fraclp/frac_ops.hpp"
#include "fraclp/grid.hpp"
#include "fraclp/objective.hpp"
#include "fraclp/smoothing.hpp"

#include <string>
#include <vector>

namespace fraclp {

struct SolverConfig {
  double alpha = 1e-2;      // V-norm regularization weight, > 0
  double beta_reg = 1e-1;   // L^p regularization weight, >= 0 (0 = Tikhonov limit)
  double p = 0.5;           // pseudonorm exponent, in (0,1)
  double eps0 = 1e-1;       // initial smoothing parameter, > 0
  double eps_decay = 0.9;   // gamma in (0,1]; eps_{k+1} = max(eps_min, gamma eps_k)
  double eps_min = 1e-6;    // >= 0; positive floor keeps psi' bounded
  double L_tilde = 1.0;     // first nonzero backtracking trial, > 0
  double bt_growth = 2.0;   // backtracking ladder growth eta, > 1
  int max_outer = 500;
  int bt_max_trials = 60;
  double tol_step = 1e-7;   // stop when ||u_{k+1} - u_k||_V <= tol_step
  double tol_cg = 1e-10;

  /// Throws std::invalid_argument listing every violated constraint.
  void validate() const;
};

struct IterationRecord {
  int k = 0;
  double eps_k = 0.0;
  double L_k = 0.0;
  int bt_trials = 0;
  double phi = 0.0;       // Phi_{eps_k}(u_k)
  double phi_next = 0.0;  // Phi_{eps_{k+1}}(u_{k+1})
  double step_V = 0.0;    // ||u_{k+1} - u_k||_V
  double support_fraction = 0.0;  // fraction of nodes with |u_{k+1}| > eps_k
  double pairing_lower = 0.0;
  double pairing_upper = 0.0;
  // beta_reg * sum_i w_i psi'_{eps_k}((u_k)_i^2) (u_{k+1} - u_k)_i^2; third
  // term of the descent inequality
  double descent_weight = 0.0;
  double stationarity_residual = 0.0;
};

/// Discrete multiplier and residual of the limit stationarity system
///   alpha A u + beta_reg M lambda = -M grad_F(u),
///   <lambda, u>_{L2,lumped} >= p ||u||_p^p,
/// with lambda_i = 2 psi'_{eps_k}((u_k)_i^2) (u_{k+1})_i (beta_reg factored
/// out of lambda). residual_norm is the V*-norm sqrt(r . A^{-1} r).
struct StationarityReport {
  GridFunction lambda;
  double residual_norm = 0.0;
  double pairing_gap = 0.0;  // <lambda,u>_{L2,lumped} - p ||u||_p^p
};

enum class RunStatus { converged, max_outer_reached, failed };

struct RunResult {
  GridFunction u;
  std::vector<IterationRecord> records;
  StationarityReport report;
  RunStatus status = RunStatus::max_outer_reached;
  std::string message;
};

struct BacktrackResult {
  double L_k = 0.0;
  GridFunction u_next;
  int trials = 0;
};

/// Phi_eps(u) = F(u) + (alpha/2)||u||_V^2 + beta_reg G_eps(u).
double phi_value(const GridFunction& u, double eps, const SolverConfig& cfg,
                 const FracOperator& op, const ObjectiveProblem& prob);

/// Minimizer of the convex surrogate at u_k: solves
/// ((alpha+L) A + M diag(2 beta_reg psi'_{eps_k}(u_k^2))) u
///    = L A u_k - M grad_F(u_k).
GridFunction subproblem_solve(const GridFunction& u_k, double eps_k, double L,
                              const SolverConfig& cfg, const FracOperator& op,
                              const ObjectiveProblem& prob);
GridFunction subproblem_solve(const GridFunction& u_k, double eps_k, double L,
                              const SolverConfig& cfg, const FracOperator& op,
                              const GridFunction& grad_uk);

/// Smallest L from {0, L_tilde, L_tilde*eta, ...} whose surrogate minimizer
/// passes F(u_+) <= F(u_k) + F'(u_k)(u_+ - u_k) + L ||u_+ - u_k||_V^2.
/// grad_F(u_k) is evaluated once and reused across trials.
BacktrackResult backtrack(const GridFunction& u_k, double eps_k,
                          const SolverConfig& cfg, const FracOperator& op,
                          const ObjectiveProblem& prob);

StationarityReport stationarity_report(const GridFunction& u_k,
                                       const GridFunction& u_next, double eps_k,
                                       const SolverConfig& cfg,
                                       const FracOperator& op,
                                       const ObjectiveProblem& prob);

/// The outer iteration: backtracked surrogate steps with the decreasing
/// smoothing schedule. Stops when ||u_{k+1} - u_k||_V <= tol_step after the
/// schedule has reached eps_min (a bitwise-zero step, an exact fixed point
/// of the surrogate map, stops immediately), or at max_outer. Partial
/// records are preserved when a step fails.
RunResult run(const SolverConfig& cfg, const FracOperator& op,
              const ObjectiveProblem& prob, const GridFunction& u0);

}  // namespace fraclp
