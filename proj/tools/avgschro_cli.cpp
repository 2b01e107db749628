#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "avgschro/experiment.hpp"

namespace {

using namespace avgschro;

void apply_overrides(ExperimentConfig& cfg, const std::string& backend,
                     long long seed, int threads) {
  if (!backend.empty()) {
    if (backend == "spectral") cfg.backend = BackendKind::spectral;
    else if (backend == "mc_fd") cfg.backend = BackendKind::mc_fd;
    else if (backend == "both") cfg.backend = BackendKind::both;
    else throw std::invalid_argument("unknown backend '" + backend + "'");
  }
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (threads > 0) cfg.threads = threads;
}

void print_outcome(const ExperimentOutcome& outcome) {
  std::cout << "artifacts: " << outcome.directory << "\n"
            << "iterations: " << outcome.iterations
            << (outcome.converged ? " (converged)" : " (max iterations)") << "\n"
            << "terminal error (L2_h): " << outcome.terminal_error << "\n"
            << "terminal error (max): " << outcome.terminal_error_max << "\n"
            << "control norm: " << outcome.control_norm << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged null control of the random Schrodinger equation"};
  app.require_subcommand(1);

  std::string backend;
  long long seed = -1;
  int threads = 0;
  app.add_option("--backend", backend, "Override backend: spectral|mc_fd|both");
  app.add_option("--seed", seed, "Override ensemble seed");
  app.add_option("--threads", threads, "Worker threads for ensemble solves");

  std::string run_config, out_dir = "out";
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", run_config, "Config file path")->required();
  run->add_option("--out", out_dir, "Artifact directory");

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Run a built-in experiment");
  preset->add_option("name", preset_name, "test1 or test2")->required();
  preset->add_option("--out", out_dir, "Artifact directory");

  std::string probe_name, probe_config;
  auto* probe = app.add_subcommand("probe", "Run a single theory probe");
  probe->add_option("name", probe_name,
                    "decay|exact_obs_defect|zero_scan|spectral_inequality|"
                    "cost_blowup|hypothesis_h")
      ->required();
  probe->add_option("config", probe_config, "Config file path")->required();
  probe->add_option("--out", out_dir, "Artifact directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = load_config(run_config);
      apply_overrides(cfg, backend, seed, threads);
      print_outcome(run_experiment(cfg, out_dir));
    } else if (preset->parsed()) {
      ExperimentConfig cfg = preset_config(preset_name);
      apply_overrides(cfg, backend, seed, threads);
      print_outcome(run_experiment(cfg, out_dir));
    } else if (probe->parsed()) {
      ExperimentConfig cfg = load_config(probe_config);
      apply_overrides(cfg, backend, seed, threads);
      ProbeReport report = run_probe(probe_name, cfg, out_dir);
      std::cout << "probe: " << report.name << "\n"
                << "inputs: " << report.inputs << "\n"
                << "verdict: " << verdict_name(report.verdict) << std::endl;
      for (const auto& note : report.notes)
        std::cout << "note: " << note << std::endl;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
