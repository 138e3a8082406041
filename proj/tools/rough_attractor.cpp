// rough-attractor <experiment> --config <file> [--set key=value]... --out <dir>
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <rough_attractor/experiments.hpp>

namespace ra = rough_attractor;

int main(int argc, char** argv) {
  CLI::App app{"Rough pullback attractor experiments"};
  std::string experiment, config_file, out_dir;
  std::vector<std::string> overrides;
  bool check_only = false;
  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(ra::experiment_names()));
  app.add_option("--config", config_file, "Flat key = value parameter file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "Override one parameter (key=value); repeatable");
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_flag("--check", check_only, "Validate the configuration and exit");
  app.set_version_flag("--version", ROUGH_ATTRACTOR_VERSION);
  CLI11_PARSE(app, argc, argv);

  ra::ExperimentConfig cfg;
  try {
    if (!config_file.empty()) cfg = ra::load_config(config_file);
    for (const auto& kv : overrides) cfg.apply_override(kv);
  } catch (const ra::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  // the positional name wins over a key in the file
  cfg.experiment = experiment;

  if (auto v = ra::validate_config(cfg); !v.empty()) {
    for (const auto& name : v) std::cerr << "constraint violated: " << name << "\n";
    return 2;
  }
  if (check_only) return 0;

  try {
    const auto r = ra::run_experiment(cfg, out_dir);
    std::printf("%s: %zu result files in %s (%.1f s)\n", experiment.c_str(), r.files.size(), out_dir.c_str(),
                r.wall_seconds);
  } catch (const ra::ConstraintError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
