#pragma once

#include "fraclp/config.hpp"
#include "fraclp/solver.hpp"

#include <cstdint>
#include <string>

namespace fraclp {

/// Gaussian noise with a deterministic generator (mt19937_64 + Box-Muller);
/// identical (sigma, seed) gives identical noise on every platform.
GridFunction add_gaussian_noise(const GridFunction& z, double sigma,
                                std::uint64_t seed);

/// Config-driven constructors, shared by run_experiment and external
/// drivers that need the same deterministic setup.
Grid build_grid(const ExperimentConfig& cfg);
FracOperator build_operator(const ExperimentConfig& cfg, const Grid& grid);
/// Reads the measurement CSV and applies the configured noise.
GridFunction load_measurement(const ExperimentConfig& cfg, const Grid& grid);
ObjectiveProblem build_objective(const ExperimentConfig& cfg, const Grid& grid,
                                 const GridFunction& z);

struct ExperimentResult {
  RunResult run;
  std::string directory;
};

/// Executes the configured run and writes iterations.csv, solution.csv,
/// report.json and manifest.txt into the output directory (plus the dense
/// operator CSV when dump_matrix is set). verbose streams one line per
/// iteration to stdout. Throws ConfigError for configuration problems and
/// std::runtime_error for runtime failures.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                bool verbose = false);

/// Runs every member of the configured sweep (one subdirectory per value,
/// FRACLP_THREADS caps parallelism) and writes summary.csv.
std::vector<ExperimentResult> run_sweep(const ExperimentConfig& cfg,
                                        bool verbose = false);

/// Derives plot-ready CSVs (phi_vs_k, step_vs_k, u_vs_x, support_mask) from
/// a completed run directory.
void emit_plotdata(const std::string& run_dir);

}  // namespace fraclp
