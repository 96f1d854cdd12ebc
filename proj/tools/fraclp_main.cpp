#include "fraclp/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

// exit codes: 0 success, 1 config error, 2 runtime failure
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

}  // namespace

namespace {

// config reference for --help, generated from the actual defaults
std::string config_help() {
  fraclp::ExperimentConfig defaults;
  defaults.z_path = "<required: measurement CSV>";
  return "Config file keys and their defaults (unknown keys are rejected; "
         "relative data paths resolve against the config file):\n\n" +
         fraclp::serialize_config(defaults) +
         "\nOptional sections: [initial] u0 = <CSV>, [sweep] parameter = "
         "<name>, values = <comma list>.\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclp: sparse L^p optimization in fractional Sobolev spaces"};
  app.require_subcommand(1);
  app.footer(config_help());

  std::string config_path, output_override, run_dir;
  bool verbose = false;

  CLI::App* cmd_run = app.add_subcommand("run", "execute a single experiment");
  cmd_run->add_option("--config", config_path, "experiment config file")
      ->required();
  cmd_run->add_option("--output", output_override, "override output directory");
  cmd_run->add_flag("--verbose", verbose, "print per-iteration diagnostics");

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run the configured parameter sweep");
  cmd_sweep->add_option("--config", config_path, "experiment config file")
      ->required();
  cmd_sweep->add_option("--output", output_override, "override output directory");
  cmd_sweep->add_flag("--verbose", verbose, "print per-iteration diagnostics");

  CLI::App* cmd_plot =
      app.add_subcommand("plotdata", "derive plot CSVs from a finished run");
  cmd_plot->add_option("run_dir", run_dir, "completed run directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(cmd_run)) {
      fraclp::ExperimentConfig cfg = fraclp::parse_config(config_path);
      if (!output_override.empty()) cfg.output_dir = output_override;
      const auto result = fraclp::run_experiment(cfg, verbose);
      std::cout << "run finished: " << result.run.records.size()
                << " iterations, outputs in " << result.directory << '\n';
    } else if (app.got_subcommand(cmd_sweep)) {
      fraclp::ExperimentConfig cfg = fraclp::parse_config(config_path);
      if (!output_override.empty()) cfg.output_dir = output_override;
      const auto results = fraclp::run_sweep(cfg, verbose);
      std::cout << "sweep finished: " << results.size() << " runs under "
                << cfg.output_dir << '\n';
    } else {
      fraclp::emit_plotdata(run_dir);
      std::cout << "plot data written to " << run_dir << '\n';
    }
  } catch (const fraclp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
