#include "fraclp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

namespace fraclp {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kTwoPi = 6.28318530717958647692;

// Tikhonov warm start: the minimizer of F + (alpha/2)||.||_V^2, computed
// exactly for tracking and by a beta_reg = 0 run of the same scheme for the
// heat objective.
GridFunction initial_iterate(const ExperimentConfig& cfg, const Grid& grid,
                             const FracOperator& op,
                             const ObjectiveProblem& prob) {
  if (!cfg.u0_path.empty()) return read_grid_function_csv(cfg.u0_path, grid);
  if (cfg.obj_kind == ObjectiveKind::tracking) {
    // (alpha A + M) u = M z
    const GridFunction rhs = grid.cell_weight() * prob.target();
    return op.solve_shifted(cfg.solver.alpha,
                            GridFunction::Ones(grid.size()), rhs,
                            cfg.solver.tol_cg);
  }
  SolverConfig warm = cfg.solver;
  warm.beta_reg = 0.0;
  warm.max_outer = std::min(cfg.solver.max_outer, 200);
  const RunResult r = run(warm, op, prob, GridFunction::Zero(grid.size()));
  if (r.status == RunStatus::failed)
    throw std::runtime_error("warm start failed: " + r.message);
  return r.u;
}

void write_iterations_csv(const std::string& path,
                          const std::vector<IterationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "k,eps_k,L_k,bt_trials,phi,phi_next,step_V,support_fraction,"
         "pairing_lower,pairing_upper,descent_weight,stationarity_residual\n";
  for (const auto& r : records) {
    out << r.k << ',' << format_double(r.eps_k) << ',' << format_double(r.L_k)
        << ',' << r.bt_trials << ',' << format_double(r.phi) << ','
        << format_double(r.phi_next) << ',' << format_double(r.step_V) << ','
        << format_double(r.support_fraction) << ','
        << format_double(r.pairing_lower) << ','
        << format_double(r.pairing_upper) << ','
        << format_double(r.descent_weight) << ','
        << format_double(r.stationarity_residual) << '\n';
  }
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_outer_reached: return "max_outer_reached";
    case RunStatus::failed: return "failed";
  }
  return "unknown";
}

void write_report_json(const std::string& path, const RunResult& res,
                       const ExperimentConfig& cfg, const Grid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const double phi_final =
      res.records.empty() ? 0.0 : res.records.back().phi_next;
  const double support =
      res.records.empty() ? 0.0 : res.records.back().support_fraction;
  out << "{\n";
  out << "  \"status\": \"" << status_name(res.status) << "\",\n";
  out << "  \"iterations\": " << res.records.size() << ",\n";
  out << "  \"phi_final\": " << format_double(phi_final) << ",\n";
  out << "  \"residual_norm\": " << format_double(res.report.residual_norm)
      << ",\n";
  out << "  \"pairing_gap\": " << format_double(res.report.pairing_gap)
      << ",\n";
  out << "  \"support_fraction\": " << format_double(support) << ",\n";
  out << "  \"lambda_l1\": "
      << format_double(res.report.lambda.size()
                           ? grid.cell_weight() *
                                 res.report.lambda.cwiseAbs().sum()
                           : 0.0)
      << ",\n";
  out << "  \"p_lp_pseudonorm\": "
      << format_double(cfg.solver.p *
                       lp_pseudonorm(grid, res.u, cfg.solver.p))
      << "\n";
  out << "}\n";
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "config_hash = " << config_hash(cfg) << "\n";
  out << "noise_seed = " << cfg.noise_seed << "\n";
  out << "version = " << kVersion << "\n";
  out << "compiler = " << __VERSION__ << "\n";
}

void write_dense_matrix_csv(const std::string& path, const FracOperator& op) {
  const Eigen::MatrixXd A = op.dense_matrix();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      out << format_double(A(i, j));
    }
    out << '\n';
  }
}

int sweep_threads() {
  if (const char* env = std::getenv("FRACLP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string value_dir_name(const std::string& parameter, double value) {
  std::ostringstream os;
  os << parameter << '_' << value;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

// minimal CSV table reader for plotdata
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::runtime_error("missing CSV column: " + name);
  }
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing run artifact: " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty run artifact: " + path);
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.header.size())
      throw std::runtime_error("ragged CSV row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

Grid build_grid(const ExperimentConfig& cfg) {
  if (cfg.dim == 1) return make_interval_grid(cfg.n, cfg.length);
  return make_rectangle_grid(cfg.n, cfg.length, cfg.n2, cfg.length2);
}

FracOperator build_operator(const ExperimentConfig& cfg, const Grid& grid) {
  if (cfg.op_kind == OperatorKind::spectral)
    return spectral_operator(grid, cfg.s);
  return integral_stiffness(grid, cfg.s);
}

GridFunction load_measurement(const ExperimentConfig& cfg, const Grid& grid) {
  const GridFunction z = read_grid_function_csv(cfg.z_path, grid);
  return add_gaussian_noise(z, cfg.noise_sigma, cfg.noise_seed);
}

ObjectiveProblem build_objective(const ExperimentConfig& cfg, const Grid& grid,
                                 const GridFunction& z) {
  if (cfg.obj_kind == ObjectiveKind::tracking)
    return ObjectiveProblem::tracking(grid, z);
  GridFunction y0 = cfg.y0_path.empty()
                        ? GridFunction::Zero(grid.size())
                        : read_grid_function_csv(cfg.y0_path, grid);
  if (!cfg.diffusivity_path.empty())
    return ObjectiveProblem::heat_source(
        grid, z, read_grid_function_csv(cfg.diffusivity_path, grid),
        cfg.reaction, y0, cfg.horizon, cfg.nt);
  return ObjectiveProblem::heat_source(grid, z, cfg.diffusivity, cfg.reaction,
                                       y0, cfg.horizon, cfg.nt);
}

GridFunction add_gaussian_noise(const GridFunction& z, double sigma,
                                std::uint64_t seed) {
  if (sigma == 0.0) return z;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    // in (0, 1]; never 0, so the log below is finite
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  GridFunction out = z;
  for (Eigen::Index i = 0; i < out.size(); i += 2) {
    const double u1 = uniform(), u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    out[i] += sigma * mag * std::cos(kTwoPi * u2);
    if (i + 1 < out.size()) out[i + 1] += sigma * mag * std::sin(kTwoPi * u2);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool verbose) {
  cfg.validate();
  const Grid grid = build_grid(cfg);
  if (cfg.dump_matrix && grid.size() > 64)
    throw ConfigError("output.dump_matrix requires n <= 64");
  const FracOperator op = build_operator(cfg, grid);
  const GridFunction z = load_measurement(cfg, grid);
  const ObjectiveProblem prob = build_objective(cfg, grid, z);
  const GridFunction u0 = initial_iterate(cfg, grid, op, prob);

  fs::create_directories(cfg.output_dir);
  RunResult res = run(cfg.solver, op, prob, u0);
  if (verbose) {
    for (const auto& r : res.records)
      std::cout << "k=" << r.k << " eps=" << r.eps_k << " L=" << r.L_k
                << " phi=" << r.phi << " step_V=" << r.step_V
                << " support=" << r.support_fraction << '\n';
    std::cout << "status: " << status_name(res.status) << '\n';
  }

  const fs::path dir(cfg.output_dir);
  write_iterations_csv((dir / "iterations.csv").string(), res.records);
  write_grid_function_csv((dir / "solution.csv").string(), grid, res.u);
  write_report_json((dir / "report.json").string(), res, cfg, grid);
  write_manifest((dir / "manifest.txt").string(), cfg);
  if (cfg.dump_matrix)
    write_dense_matrix_csv((dir / "operator.csv").string(), op);
  if (res.status == RunStatus::failed)
    throw std::runtime_error("solver failed after " +
                             std::to_string(res.records.size()) +
                             " iterations: " + res.message +
                             " (partial records written to " + dir.string() +
                             ")");
  return {std::move(res), dir.string()};
}

std::vector<ExperimentResult> run_sweep(const ExperimentConfig& cfg,
                                        bool verbose) {
  cfg.validate();
  if (!cfg.sweep) throw ConfigError("sweep requested but [sweep] is missing");
  const SweepSpec sweep = *cfg.sweep;

  std::vector<ExperimentConfig> members;
  for (double v : sweep.values) {
    ExperimentConfig member = cfg;
    member.sweep.reset();
    set_parameter(member, sweep.parameter, v);
    member.output_dir = (fs::path(cfg.output_dir) /
                         value_dir_name(sweep.parameter, v))
                            .string();
    member.validate();
    members.push_back(std::move(member));
  }

  std::vector<ExperimentResult> results(members.size());
  std::vector<std::string> errors(members.size());
  const int workers =
      std::min<int>(sweep_threads(), static_cast<int>(members.size()));
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (size_t i = next.fetch_add(1); i < members.size();
           i = next.fetch_add(1)) {
        try {
          results[i] = run_experiment(members[i], false);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error("sweep member " +
                               value_dir_name(sweep.parameter, sweep.values[i]) +
                               " failed: " + errors[i]);

  std::ofstream summary(fs::path(cfg.output_dir) / "summary.csv");
  if (!summary) throw std::runtime_error("cannot write sweep summary");
  summary << sweep.parameter << ",phi_final,support_fraction,pairing_gap\n";
  for (size_t i = 0; i < members.size(); ++i) {
    const auto& recs = results[i].run.records;
    summary << format_double(sweep.values[i]) << ','
            << format_double(recs.empty() ? 0.0 : recs.back().phi_next) << ','
            << format_double(recs.empty() ? 0.0
                                          : recs.back().support_fraction)
            << ',' << format_double(results[i].run.report.pairing_gap) << '\n';
  }
  if (verbose)
    std::cout << "sweep complete: " << members.size() << " runs under "
              << cfg.output_dir << '\n';
  return results;
}

void emit_plotdata(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const Table iters = read_table((dir / "iterations.csv").string());
  const Table sol = read_table((dir / "solution.csv").string());
  if (iters.rows.empty())
    throw std::runtime_error("run directory has no iterations: " + run_dir);

  {
    std::ofstream out(dir / "phi_vs_k.csv");
    out << "k,phi\n";
    const int ck = iters.column("k"), cphi = iters.column("phi");
    const int cnext = iters.column("phi_next");
    for (const auto& r : iters.rows)
      out << static_cast<long long>(r[ck]) << ','
          << format_double(r[cphi]) << '\n';
    // append the final iterate's value so the trace covers every iterate
    out << static_cast<long long>(iters.rows.back()[ck]) + 1 << ','
        << format_double(iters.rows.back()[cnext]) << '\n';
  }
  {
    std::ofstream out(dir / "step_vs_k.csv");
    out << "k,step_V\n";
    const int ck = iters.column("k"), cs = iters.column("step_V");
    for (const auto& r : iters.rows)
      out << static_cast<long long>(r[ck]) << ',' << format_double(r[cs])
          << '\n';
  }
  const bool two_d = sol.header.size() == 3;
  {
    std::ofstream out(dir / "u_vs_x.csv");
    out << (two_d ? "x,y,value\n" : "x,value\n");
    for (const auto& r : sol.rows) {
      for (size_t c = 0; c < r.size(); ++c) {
        if (c) out << ',';
        out << format_double(r[c]);
      }
      out << '\n';
    }
  }
  {
    const double eps_final = iters.rows.back()[iters.column("eps_k")];
    std::ofstream out(dir / "support_mask.csv");
    out << (two_d ? "x,y,mask\n" : "x,mask\n");
    const size_t vcol = sol.header.size() - 1;
    for (const auto& r : sol.rows) {
      for (size_t c = 0; c + 1 < r.size(); ++c)
        out << format_double(r[c]) << ',';
      out << (std::abs(r[vcol]) > eps_final ? 1 : 0) << '\n';
    }
  }
}

}  // namespace fraclp
