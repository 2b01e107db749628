#pragma once

#include <string>

#include "avgschro/config.hpp"
#include "avgschro/theory_checks.hpp"

namespace avgschro {

struct ExperimentOutcome {
  std::string directory;
  double terminal_error = 0.0;
  double terminal_error_max = 0.0;
  double control_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Runs the configured experiment and writes the artifact set into `out_dir`:
/// samples.csv, uncontrolled.csv, controlled.csv, control.csv, residuals.csv,
/// summary.txt, config.txt and plots.py. With backend "both", the mc_fd run
/// populates the directory and the spectral run lands in a "spectral"
/// subdirectory. Named probes run afterwards, each writing
/// <probe>_probe.csv and <probe>_summary.txt.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const std::string& out_dir);

/// Runs a single named probe from the config and writes its artifacts.
ProbeReport run_probe(const std::string& name, const ExperimentConfig& config,
                      const std::string& out_dir);

void write_probe_report(const ProbeReport& report, const std::string& out_dir);

/// Standalone matplotlib script that regenerates the figure set from the CSVs
/// in its directory.
void emit_plot_script(const std::string& out_dir);

/// Round-trip double formatting (17 significant digits) used by every CSV.
std::string format_full(double v);

}  // namespace avgschro
