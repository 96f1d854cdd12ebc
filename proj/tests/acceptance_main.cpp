// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Pass --configs <dir> to point at the shipped experiment configs.

#include "fraclp/experiment.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace fraclp;
using fraclp_tests::discrete_eigenvalue;
using fraclp_tests::GagliardoOracle;
using fraclp_tests::kPi;

namespace {

std::string g_config_dir = "configs";
std::filesystem::path g_out_dir;

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

GridFunction random_vector(int n, std::mt19937_64& rng, double lo = -1.0,
                           double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  GridFunction v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// 1. psi sandwich and monotonicity in eps
Checker criterion_psi_sandwich() {
  Checker c;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dp(0.02, 0.98), de(1e-6, 2.0),
      dt(-4.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = dp(rng), t = dt(rng);
    double e1 = de(rng), e2 = de(rng);
    if (e1 > e2) std::swap(e1, e2);
    const double tp = std::pow(std::abs(t), p);
    const double upper = tp + (1.0 - 0.5 * p) * std::pow(e1, p);
    const double v1 = psi({p, e1}, t * t);
    const double v2 = psi({p, e2}, t * t);
    const double scale = 1.0 + tp;
    worst = std::max(worst, (tp - v1) / scale);
    worst = std::max(worst, (v1 - upper) / scale);
    worst = std::max(worst, (v1 - v2) / (1.0 + v2));
    c.require(v1 >= tp - 1e-13 * scale, "lower sandwich violated");
    c.require(v1 <= upper + 1e-13 * scale, "upper sandwich violated");
    c.require(v1 <= v2 + 1e-13 * (1.0 + v2), "eps-monotonicity violated");
  }
  if (c.ok) c.detail = "worst signed violation " + fmt(worst);
  return c;
}

// 2. G_eps gradient against central differences
Checker criterion_g_eps_gradient() {
  Checker c;
  const int n = 64;
  const Grid g = make_interval_grid(n, 1.0);
  const PsiParams params{0.5, 0.1};
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const GridFunction u = random_vector(n, rng);
    const GridFunction h = random_vector(n, rng);
    const GridFunction grad = g_eps_grad(g, u, params);
    const double pairing = g.cell_weight() * grad.dot(h);
    const double delta = 1e-6;
    const double fd = (g_eps(g, (u + delta * h).eval(), params) -
                       g_eps(g, (u - delta * h).eval(), params)) /
                      (2.0 * delta);
    const double rel = std::abs(pairing - fd) / (1.0 + std::abs(fd));
    worst = std::max(worst, rel);
    c.require(rel <= 1e-6, "gradient mismatch " + fmt(rel));
  }
  if (c.ok) c.detail = "worst relative error " + fmt(worst);
  return c;
}

// 3. pairing bound ordering and equality case
Checker criterion_pairing_bound() {
  Checker c;
  const int n = 50;
  const Grid g = make_interval_grid(n, 1.0);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dp(0.05, 0.95);
  for (int rep = 0; rep < 1000; ++rep) {
    const double p = dp(rng);
    const double eps = 0.05 + 0.5 * dp(rng);
    GridFunction u = random_vector(n, rng);
    u[rep % n] = 0.3 * eps;  // mix magnitudes above and below eps
    const PairingBound b = pairing_bound(g, u, {p, eps});
    c.require(b.lower <= b.upper + 1e-13 * (1.0 + b.upper),
              "lower > upper at rep " + std::to_string(rep));
  }
  // equality when every |u_i| >= eps
  const PsiParams params{0.5, 0.1};
  GridFunction big(n);
  for (int i = 0; i < n; ++i) big[i] = (i % 2 ? 1.0 : -1.0) * (0.1 + 0.01 * i);
  const PairingBound b = pairing_bound(g, big, params);
  c.require(std::abs(b.lower - b.upper) <= 1e-13 * (1.0 + b.upper),
            "equality case violated");
  if (c.ok) c.detail = "1000 random draws + equality case";
  return c;
}

// 4. spectral eigenvalue consistency, Richardson order
Checker criterion_spectral_consistency() {
  Checker c;
  double worst_rate = 1e9;
  for (double s : {0.25, 0.5, 0.75}) {
    for (int k = 0; k < 5; ++k) {
      double prev = -1.0;
      for (int n : {64, 128, 256}) {
        const double exact = std::pow((k + 1) * kPi, 2.0 * s);
        const double err =
            std::abs(std::pow(discrete_eigenvalue(n, 1.0, k), s) - exact);
        if (prev > 0.0) {
          const double rate = std::log2(prev / err);
          worst_rate = std::min(worst_rate, rate);
          c.require(rate >= 1.9, "rate " + fmt(rate) + " at s=" + fmt(s) +
                                     " k=" + std::to_string(k + 1));
        }
        prev = err;
      }
    }
  }
  if (c.ok) c.detail = "observed order >= " + fmt(worst_rate);
  return c;
}

// 5. integral quadratic form vs brute-force Gagliardo reference
Checker criterion_integral_oracle() {
  Checker c;
  const int n = 128;
  const Grid g = make_interval_grid(n, 1.0);
  GridFunction u(n);
  for (int i = 0; i < n; ++i) u[i] = std::sin(kPi * g.x(i));
  double worst = 0.0;
  for (double s : {0.3, 0.5, 0.7}) {
    const FracOperator op = integral_stiffness(g, s);
    const double form = op.inner(u, u) - g.cell_weight() * u.squaredNorm();
    const double ref = GagliardoOracle(g, u).quadratic_form(s);
    const double rel = std::abs(form - ref) / std::abs(ref);
    worst = std::max(worst, rel);
    c.require(rel <= 0.01, "relative error " + fmt(rel) + " at s=" + fmt(s));
  }
  if (c.ok) c.detail = "worst relative error " + fmt(worst);
  return c;
}

// 6. heat adjoint: dot-product test and full gradient check
Checker criterion_heat_adjoint() {
  Checker c;
  const int n = 64, nt = 50;
  const Grid g = make_interval_grid(n, 1.0);
  std::mt19937_64 rng(123);
  const GridFunction y0 = random_vector(n, rng);
  const GridFunction z = random_vector(n, rng);
  for (ReactionKind reaction : {ReactionKind::zero, ReactionKind::cubic}) {
    const ObjectiveProblem prob =
        ObjectiveProblem::heat_source(g, z, 1.0, reaction, y0, 0.1, nt);
    const GridFunction u = random_vector(n, rng, -0.5, 0.5);

    // dot-product test of the transposed linearization
    const GridFunction h = random_vector(n, rng);
    const GridFunction seed = random_vector(n, rng);
    const HeatTrajectory traj = prob.heat_forward(u);
    const ObjectiveProblem seeded = ObjectiveProblem::heat_source(
        g, (traj.states.back() - seed).eval(), 1.0, reaction, y0, 0.1, nt);
    const GridFunction adj = seeded.heat_adjoint(traj);
    if (reaction == ReactionKind::zero) {
      // linear scheme: difference quotient is exact up to roundoff
      const GridFunction yp = prob.heat_forward(u + h).states.back();
      const GridFunction y_ = prob.heat_forward(u).states.back();
      const double lhs = (yp - y_).dot(seed);
      const double rhs = h.dot(adj);
      c.require(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs),
                "dot-product mismatch (linear)");
    }

    // full gradient against central differences
    const GridFunction grad = prob.grad(u);
    const double tol = (reaction == ReactionKind::zero) ? 1e-6 : 1e-5;
    for (int rep = 0; rep < 5; ++rep) {
      const GridFunction dir = random_vector(n, rng);
      const double delta = 1e-5;
      const double fd =
          (prob.eval(u + delta * dir) - prob.eval(u - delta * dir)) /
          (2.0 * delta);
      const double rel =
          std::abs(g.cell_weight() * grad.dot(dir) - fd) / (1.0 + std::abs(fd));
      c.require(rel <= tol, "gradient mismatch " + fmt(rel));
    }
  }
  if (c.ok) c.detail = "linear exact, cubic within 1e-5";
  return c;
}

struct ShippedRun {
  std::string name;
  ExperimentConfig cfg;
  ExperimentResult result;
};

std::vector<ShippedRun>& shipped_runs() {
  static std::vector<ShippedRun> runs;
  if (runs.empty()) {
    for (const char* name : {"denoise_1d", "heat_source_1d"}) {
      ShippedRun r;
      r.name = name;
      r.cfg = parse_config(g_config_dir + "/" + name + ".ini");
      r.cfg.output_dir = (g_out_dir / name).string();
      r.result = run_experiment(r.cfg);
      runs.push_back(std::move(r));
    }
  }
  return runs;
}

// 7. three-term monotone descent on the shipped configs
Checker criterion_monotone_descent() {
  Checker c;
  for (const ShippedRun& r : shipped_runs()) {
    const double alpha = r.cfg.solver.alpha;
    const auto& recs = r.result.run.records;
    c.require(!recs.empty(), r.name + ": no records");
    for (size_t k = 0; k < recs.size(); ++k) {
      const IterationRecord& rec = recs[k];
      const double lhs = rec.phi_next + 0.5 * alpha * rec.step_V * rec.step_V +
                         rec.descent_weight;
      c.require(lhs <= rec.phi + 1e-10 * (1.0 + std::abs(rec.phi)),
                r.name + ": three-term descent fails at k=" +
                    std::to_string(rec.k));
      c.require(rec.phi_next <= rec.phi + 1e-10 * (1.0 + std::abs(rec.phi)),
                r.name + ": phi increases at k=" + std::to_string(rec.k));
    }
  }
  if (c.ok) c.detail = "denoise + heat, every iteration";
  return c;
}

// 8. summability of the weighted step sums
Checker criterion_summability() {
  Checker c;
  for (const ShippedRun& r : shipped_runs()) {
    const auto& recs = r.result.run.records;
    double sum = 0.0;
    for (const IterationRecord& rec : recs)
      sum += 0.5 * r.cfg.solver.alpha * rec.step_V * rec.step_V;
    const double budget = recs.front().phi - recs.back().phi_next;
    c.require(sum <= budget * (1.0 + 1e-9) + 1e-18,
              r.name + ": partial sum " + fmt(sum) + " > budget " + fmt(budget));
  }
  if (c.ok) c.detail = "partial sums within the descent budget";
  return c;
}

// 9. stationarity at convergence
Checker criterion_stationarity() {
  Checker c;
  for (const ShippedRun& r : shipped_runs()) {
    c.require(r.result.run.status == RunStatus::converged,
              r.name + ": run did not converge");
    if (r.result.run.status != RunStatus::converged) continue;
    const Grid grid = build_grid(r.cfg);
    const FracOperator op = build_operator(r.cfg, grid);
    const ObjectiveProblem prob =
        build_objective(r.cfg, grid, load_measurement(r.cfg, grid));
    const GridFunction& u = r.result.run.u;
    const IterationRecord& last = r.result.run.records.back();

    const double lp = lp_pseudonorm(grid, u, r.cfg.solver.p);
    const double gap = r.result.run.report.pairing_gap;
    c.require(gap >= -1e-6 * (1.0 + r.cfg.solver.p * lp),
              r.name + ": pairing gap " + fmt(gap));

    const double scale =
        (1.0 + last.L_k) * (1.0 + std::sqrt(op.inner(u, u))) *
        (1.0 + std::sqrt(grid.cell_weight()) * prob.grad(u).norm());
    const double bound =
        10.0 * (r.cfg.solver.tol_step + r.cfg.solver.tol_cg) * scale;
    c.require(r.result.run.report.residual_norm <= bound,
              r.name + ": residual " + fmt(r.result.run.report.residual_norm) +
                  " > " + fmt(bound));
  }
  if (c.ok) c.detail = "residual and pairing gap within bounds";
  return c;
}

// 10. shifted-subproblem dense oracle
Checker criterion_subproblem_oracle() {
  Checker c;
  const int n = 5;
  const Grid g = make_interval_grid(n, 1.0);
  const FracOperator op = spectral_operator(g, 0.5);
  const Eigen::MatrixXd A = op.dense_matrix();
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const double cshift = 0.05 + dist(rng);
    GridFunction w(n), rhs(n);
    for (int i = 0; i < n; ++i) {
      w[i] = 3.0 * dist(rng);
      rhs[i] = 2.0 * dist(rng) - 1.0;
    }
    Eigen::MatrixXd sys = cshift * A;
    sys.diagonal() += g.cell_weight() * w;
    const GridFunction direct = sys.ldlt().solve(rhs);
    const GridFunction iterative = op.solve_shifted(cshift, w, rhs, 1e-13);
    const double rel = (direct - iterative).norm() / (1.0 + direct.norm());
    worst = std::max(worst, rel);
    c.require(rel <= 1e-8, "solver mismatch " + fmt(rel));
  }
  if (c.ok) c.detail = "50 random SPD instances, worst " + fmt(worst);
  return c;
}

// 11. beta_reg = 0 degenerates to the Tikhonov solution
Checker criterion_tikhonov_limit() {
  Checker c;
  const int n = 96;
  const Grid g = make_interval_grid(n, 1.0);
  const FracOperator op = spectral_operator(g, 0.4);
  GridFunction z(n);
  for (int i = 0; i < n; ++i) {
    const double x = g.x(i);
    z[i] = (x > 0.2 && x < 0.4) ? 1.0 : (x > 0.6 && x < 0.7) ? -0.7 : 0.0;
  }
  const ObjectiveProblem prob = ObjectiveProblem::tracking(g, z);
  SolverConfig cfg;
  cfg.alpha = 0.5;
  cfg.beta_reg = 0.0;
  cfg.eps0 = 0.1;
  cfg.eps_min = 1e-6;
  cfg.L_tilde = 0.25;
  cfg.max_outer = 500;
  cfg.tol_step = 1e-10;
  cfg.tol_cg = 1e-13;
  const RunResult res = run(cfg, op, prob, GridFunction::Zero(n));
  c.require(res.status == RunStatus::converged, "run did not converge");

  Eigen::MatrixXd sys = cfg.alpha * op.dense_matrix();
  sys.diagonal().array() += g.cell_weight();
  const GridFunction direct = sys.ldlt().solve(g.cell_weight() * z);
  const GridFunction diff = res.u - direct;
  const double rel =
      std::sqrt(op.inner(diff, diff) / op.inner(direct, direct));
  c.require(rel <= 1e-6, "V-norm error " + fmt(rel));
  if (c.ok) c.detail = "V-norm relative error " + fmt(rel);
  return c;
}

// 12. sparsity monotone in beta_reg on the shipped sweep
Checker criterion_sparsity_sweep() {
  Checker c;
  ExperimentConfig cfg = parse_config(g_config_dir + "/denoise_sweep.ini");
  cfg.output_dir = (g_out_dir / "denoise_sweep").string();
  const auto results = run_sweep(cfg);
  c.require(results.size() == 3, "expected 3 sweep members");
  std::string supports;
  double prev = 2.0;
  for (const ExperimentResult& r : results) {
    const double s = r.run.records.back().support_fraction;
    supports += (supports.empty() ? "" : " >= ") + fmt(s);
    c.require(s <= prev + 1e-15, "support fraction increased: " + supports);
    prev = s;
  }
  if (c.ok) c.detail = "support " + supports;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--configs") g_config_dir = argv[i + 1];
  g_out_dir = std::filesystem::temp_directory_path() / "fraclp_acceptance";
  std::filesystem::create_directories(g_out_dir);

  struct Entry {
    int id;
    const char* name;
    std::function<Checker()> fn;
  };
  const std::vector<Entry> entries = {
      {1, "psi sandwich and eps-monotonicity", criterion_psi_sandwich},
      {2, "G_eps gradient vs central differences", criterion_g_eps_gradient},
      {3, "pairing bound ordering", criterion_pairing_bound},
      {4, "spectral eigenvalue consistency", criterion_spectral_consistency},
      {5, "integral form vs Gagliardo brute force", criterion_integral_oracle},
      {6, "heat adjoint and gradient checks", criterion_heat_adjoint},
      {7, "monotone three-term descent", criterion_monotone_descent},
      {8, "step-sum summability", criterion_summability},
      {9, "stationarity at convergence", criterion_stationarity},
      {10, "shifted subproblem dense oracle", criterion_subproblem_oracle},
      {11, "beta_reg = 0 Tikhonov limit", criterion_tikhonov_limit},
      {12, "sparsity monotone in beta_reg", criterion_sparsity_sweep},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Checker c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n",
                c.ok ? "PASS" : "FAIL", e.id, e.name, secs,
                c.detail.empty() ? "" : " -- ", c.detail.c_str());
    if (!c.ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
