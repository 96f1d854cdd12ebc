#include "fraclp/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fraclp {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KeyValue {
  std::string value;
  int line;
  mutable bool used = false;
};

using Sections = std::map<std::string, KeyValue>;  // "section.key" -> value

Sections lex(const std::string& text) {
  Sections out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key " + full);
    out[full] = {value, lineno};
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const Sections& sections) : sections_(sections) {}

  std::optional<std::string> raw(const std::string& key) {
    auto it = sections_.find(key);
    if (it == sections_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  void get(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }

  void get(const std::string& key, double& out) {
    if (auto v = raw(key)) {
      try {
        size_t pos = 0;
        out = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        fail(key, "not a number: " + *v);
      }
    }
  }

  void get(const std::string& key, int& out) {
    if (auto v = raw(key)) {
      try {
        size_t pos = 0;
        out = std::stoi(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        fail(key, "not an integer: " + *v);
      }
    }
  }

  void get(const std::string& key, std::uint64_t& out) {
    if (auto v = raw(key)) {
      try {
        size_t pos = 0;
        out = std::stoull(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        fail(key, "not an unsigned integer: " + *v);
      }
    }
  }

  void get(const std::string& key, bool& out) {
    if (auto v = raw(key)) {
      if (*v == "true" || *v == "1")
        out = true;
      else if (*v == "false" || *v == "0")
        out = false;
      else
        fail(key, "not a boolean (true/false): " + *v);
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) {
    throw ConfigError("config key " + key + ": " + msg);
  }

  void reject_unknown() const {
    std::string unknown;
    for (const auto& [key, kv] : sections_) {
      if (!kv.used) {
        unknown += unknown.empty() ? "" : ", ";
        unknown += key + " (line " + std::to_string(kv.line) + ")";
      }
    }
    if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
  }

 private:
  const Sections& sections_;
};

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

std::vector<double> parse_value_list(const std::string& text,
                                     const std::string& key) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": bad list entry: " + item);
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& base_dir) {
  const Sections sections = lex(text);
  Reader r(sections);
  ExperimentConfig cfg;

  r.get("grid.dim", cfg.dim);
  r.get("grid.n", cfg.n);
  r.get("grid.n2", cfg.n2);
  r.get("grid.length", cfg.length);
  r.get("grid.length2", cfg.length2);

  if (auto v = r.raw("operator.kind")) {
    if (*v == "spectral")
      cfg.op_kind = OperatorKind::spectral;
    else if (*v == "integral")
      cfg.op_kind = OperatorKind::integral;
    else
      r.fail("operator.kind", "must be spectral or integral, got " + *v);
  }
  r.get("operator.s", cfg.s);

  if (auto v = r.raw("objective.kind")) {
    if (*v == "tracking")
      cfg.obj_kind = ObjectiveKind::tracking;
    else if (*v == "heat_source")
      cfg.obj_kind = ObjectiveKind::heat_source;
    else
      r.fail("objective.kind", "must be tracking or heat_source, got " + *v);
  }
  r.get("objective.z", cfg.z_path);
  r.get("objective.noise_sigma", cfg.noise_sigma);
  r.get("objective.noise_seed", cfg.noise_seed);
  r.get("objective.y0", cfg.y0_path);
  r.get("objective.diffusivity", cfg.diffusivity);
  r.get("objective.diffusivity_file", cfg.diffusivity_path);
  if (auto v = r.raw("objective.reaction")) {
    if (*v == "zero")
      cfg.reaction = ReactionKind::zero;
    else if (*v == "cubic")
      cfg.reaction = ReactionKind::cubic;
    else
      r.fail("objective.reaction", "must be zero or cubic, got " + *v);
  }
  r.get("objective.horizon", cfg.horizon);
  r.get("objective.nt", cfg.nt);

  r.get("initial.u0", cfg.u0_path);

  r.get("solver.alpha", cfg.solver.alpha);
  r.get("solver.beta_reg", cfg.solver.beta_reg);
  r.get("solver.p", cfg.solver.p);
  r.get("solver.eps0", cfg.solver.eps0);
  r.get("solver.eps_decay", cfg.solver.eps_decay);
  r.get("solver.eps_min", cfg.solver.eps_min);
  r.get("solver.L_tilde", cfg.solver.L_tilde);
  r.get("solver.bt_growth", cfg.solver.bt_growth);
  r.get("solver.max_outer", cfg.solver.max_outer);
  r.get("solver.bt_max_trials", cfg.solver.bt_max_trials);
  r.get("solver.tol_step", cfg.solver.tol_step);
  r.get("solver.tol_cg", cfg.solver.tol_cg);

  r.get("output.dir", cfg.output_dir);
  r.get("output.dump_matrix", cfg.dump_matrix);

  std::string sweep_param;
  r.get("sweep.parameter", sweep_param);
  if (auto v = r.raw("sweep.values")) {
    if (sweep_param.empty())
      throw ConfigError("sweep.values given without sweep.parameter");
    cfg.sweep = SweepSpec{sweep_param, parse_value_list(*v, "sweep.values")};
  } else if (!sweep_param.empty()) {
    throw ConfigError("sweep.parameter given without sweep.values");
  }

  r.reject_unknown();

  cfg.z_path = resolve(base_dir, cfg.z_path);
  cfg.y0_path = resolve(base_dir, cfg.y0_path);
  cfg.diffusivity_path = resolve(base_dir, cfg.diffusivity_path);
  cfg.u0_path = resolve(base_dir, cfg.u0_path);

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(),
                           std::filesystem::path(path).parent_path().string());
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  auto check = [&errs](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  check(dim == 1 || dim == 2, "grid.dim must be 1 or 2");
  check(n >= 2, "grid.n must be >= 2");
  check(length > 0.0, "grid.length must be positive");
  if (dim == 2) {
    check(n2 >= 2, "grid.n2 must be >= 2");
    check(length2 > 0.0, "grid.length2 must be positive");
    check(op_kind == OperatorKind::spectral,
          "operator.kind must be spectral on 2-D grids");
    check(obj_kind == ObjectiveKind::tracking,
          "objective.kind heat_source supports 1-D grids only");
  }
  check(s > 0.0 && s < 1.0, "operator.s must lie in (0,1)");
  check(!z_path.empty(), "objective.z (measurement CSV) is required");
  check(noise_sigma >= 0.0, "objective.noise_sigma must be >= 0");
  if (obj_kind == ObjectiveKind::heat_source) {
    check(horizon > 0.0, "objective.horizon must be > 0");
    check(nt >= 1, "objective.nt must be >= 1");
    check(diffusivity > 0.0 || !diffusivity_path.empty(),
          "objective.diffusivity must be positive");
  }
  check(solver.alpha > 0.0, "solver.alpha must be > 0");
  check(solver.beta_reg >= 0.0, "solver.beta_reg must be >= 0");
  check(solver.p > 0.0 && solver.p < 1.0, "solver.p must lie in (0,1)");
  check(solver.eps0 > 0.0, "solver.eps0 must be > 0");
  check(solver.eps_decay > 0.0 && solver.eps_decay <= 1.0,
        "solver.eps_decay must lie in (0,1]");
  check(solver.eps_min >= 0.0, "solver.eps_min must be >= 0");
  check(solver.L_tilde > 0.0, "solver.L_tilde must be > 0");
  check(solver.bt_growth > 1.0, "solver.bt_growth must be > 1");
  check(solver.max_outer >= 1, "solver.max_outer must be >= 1");
  check(solver.bt_max_trials >= 1, "solver.bt_max_trials must be >= 1");
  check(solver.tol_step > 0.0, "solver.tol_step must be > 0");
  check(solver.tol_cg > 0.0, "solver.tol_cg must be > 0");
  check(!output_dir.empty(), "output.dir must not be empty");
  if (sweep) {
    check(!sweep->values.empty(), "sweep.values must not be empty");
    if (!sweep->parameter.empty()) {
      ExperimentConfig probe = *this;
      probe.sweep.reset();
      try {
        set_parameter(probe, sweep->parameter, sweep->values.empty()
                                                   ? 0.0
                                                   : sweep->values.front());
      } catch (const ConfigError& e) {
        errs.push_back(e.what());
      }
    }
  }
  if (!errs.empty()) {
    std::string all = "invalid config:";
    for (const auto& e : errs) all += "\n  - " + e;
    throw ConfigError(all);
  }
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "dim = " << cfg.dim << "\n";
  out << "n = " << cfg.n << "\n";
  out << "length = " << format_double(cfg.length) << "\n";
  if (cfg.dim == 2) {
    out << "n2 = " << cfg.n2 << "\n";
    out << "length2 = " << format_double(cfg.length2) << "\n";
  }
  out << "\n[operator]\n";
  out << "kind = "
      << (cfg.op_kind == OperatorKind::spectral ? "spectral" : "integral")
      << "\n";
  out << "s = " << format_double(cfg.s) << "\n";
  out << "\n[objective]\n";
  out << "kind = "
      << (cfg.obj_kind == ObjectiveKind::tracking ? "tracking" : "heat_source")
      << "\n";
  out << "z = " << cfg.z_path << "\n";
  out << "noise_sigma = " << format_double(cfg.noise_sigma) << "\n";
  out << "noise_seed = " << cfg.noise_seed << "\n";
  if (cfg.obj_kind == ObjectiveKind::heat_source) {
    if (!cfg.y0_path.empty()) out << "y0 = " << cfg.y0_path << "\n";
    if (!cfg.diffusivity_path.empty())
      out << "diffusivity_file = " << cfg.diffusivity_path << "\n";
    else
      out << "diffusivity = " << format_double(cfg.diffusivity) << "\n";
    out << "reaction = "
        << (cfg.reaction == ReactionKind::zero ? "zero" : "cubic") << "\n";
    out << "horizon = " << format_double(cfg.horizon) << "\n";
    out << "nt = " << cfg.nt << "\n";
  }
  if (!cfg.u0_path.empty()) {
    out << "\n[initial]\n";
    out << "u0 = " << cfg.u0_path << "\n";
  }
  out << "\n[solver]\n";
  out << "alpha = " << format_double(cfg.solver.alpha) << "\n";
  out << "beta_reg = " << format_double(cfg.solver.beta_reg) << "\n";
  out << "p = " << format_double(cfg.solver.p) << "\n";
  out << "eps0 = " << format_double(cfg.solver.eps0) << "\n";
  out << "eps_decay = " << format_double(cfg.solver.eps_decay) << "\n";
  out << "eps_min = " << format_double(cfg.solver.eps_min) << "\n";
  out << "L_tilde = " << format_double(cfg.solver.L_tilde) << "\n";
  out << "bt_growth = " << format_double(cfg.solver.bt_growth) << "\n";
  out << "max_outer = " << cfg.solver.max_outer << "\n";
  out << "bt_max_trials = " << cfg.solver.bt_max_trials << "\n";
  out << "tol_step = " << format_double(cfg.solver.tol_step) << "\n";
  out << "tol_cg = " << format_double(cfg.solver.tol_cg) << "\n";
  out << "\n[output]\n";
  out << "dir = " << cfg.output_dir << "\n";
  out << "dump_matrix = " << (cfg.dump_matrix ? "true" : "false") << "\n";
  if (cfg.sweep) {
    out << "\n[sweep]\n";
    out << "parameter = " << cfg.sweep->parameter << "\n";
    out << "values = ";
    for (size_t i = 0; i < cfg.sweep->values.size(); ++i) {
      if (i) out << ", ";
      out << format_double(cfg.sweep->values[i]);
    }
    out << "\n";
  }
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void set_parameter(ExperimentConfig& cfg, const std::string& name,
                   double value) {
  if (name == "alpha")
    cfg.solver.alpha = value;
  else if (name == "beta_reg")
    cfg.solver.beta_reg = value;
  else if (name == "p")
    cfg.solver.p = value;
  else if (name == "eps0")
    cfg.solver.eps0 = value;
  else if (name == "eps_decay")
    cfg.solver.eps_decay = value;
  else if (name == "eps_min")
    cfg.solver.eps_min = value;
  else if (name == "L_tilde")
    cfg.solver.L_tilde = value;
  else if (name == "bt_growth")
    cfg.solver.bt_growth = value;
  else if (name == "tol_step")
    cfg.solver.tol_step = value;
  else if (name == "tol_cg")
    cfg.solver.tol_cg = value;
  else if (name == "s")
    cfg.s = value;
  else if (name == "noise_sigma")
    cfg.noise_sigma = value;
  else if (name == "horizon")
    cfg.horizon = value;
  else
    throw ConfigError("sweep.parameter: unknown parameter " + name);
}

}  // namespace fraclp
