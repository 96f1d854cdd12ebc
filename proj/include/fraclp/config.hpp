#pragma once

#include "fraclp/frac_ops.hpp"
#include "fraclp/objective.hpp"
#include "fraclp/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fraclp {

/// Configuration problems (parse errors, unknown keys, constraint
/// violations). Distinct from runtime failures so the CLI can map them to
/// exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

struct ExperimentConfig {
  SolverConfig solver;

  // [grid]
  int dim = 1;
  int n = 64, n2 = 64;
  double length = 1.0, length2 = 1.0;

  // [operator]
  OperatorKind op_kind = OperatorKind::spectral;
  double s = 0.5;

  // [objective]
  ObjectiveKind obj_kind = ObjectiveKind::tracking;
  std::string z_path;           // required; resolved relative to the config file
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  std::string y0_path;          // heat_source; empty = zero base state
  double diffusivity = 1.0;
  std::string diffusivity_path; // overrides the constant when set
  ReactionKind reaction = ReactionKind::zero;
  double horizon = 0.1;
  int nt = 50;

  // [initial]
  std::string u0_path;  // empty = Tikhonov warm start (beta_reg = 0)

  // [output]
  std::string output_dir = "out";
  bool dump_matrix = false;  // dense operator CSV, n <= 64 only

  std::optional<SweepSpec> sweep;

  /// Throws ConfigError listing every violated constraint.
  void validate() const;
};

/// Parses the flat key = value sections of a config file. Unknown keys and
/// sections are rejected by name. Relative data paths are resolved against
/// the config file's directory.
ExperimentConfig parse_config(const std::string& path);

/// Inverse of parse_config up to formatting; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& base_dir);

/// FNV-1a hash of the serialized config, recorded in run manifests.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Applies a sweep parameter by name (alpha, beta_reg, p, eps0, eps_decay,
/// eps_min, L_tilde, bt_growth, tol_step, tol_cg, s, noise_sigma, horizon).
void set_parameter(ExperimentConfig& cfg, const std::string& name, double value);

}  // namespace fraclp
