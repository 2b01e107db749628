#include "avgschro/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace avgschro {

namespace fs = std::filesystem;

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // fixed newlines on any platform
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void write_field_csv(const fs::path& path, const Trajectory& traj,
                     const TimeGrid& time) {
  std::ofstream out = open_out(path);
  out << "time,node,re,im,modulus\n";
  for (std::size_t n = 0; n < traj.size(); ++n) {
    std::string t = format_full(time.node(static_cast<int>(n)));
    for (std::size_t j = 0; j < traj[n].size(); ++j) {
      const Complex& v = traj[n][j];
      out << t << ',' << (j + 1) << ',' << format_full(v.real()) << ','
          << format_full(v.imag()) << ',' << format_full(std::abs(v)) << '\n';
    }
  }
}

void write_control_csv(const fs::path& path, const ControlField& u,
                       const TimeGrid& time) {
  std::ofstream out = open_out(path);
  out << "time,node,re,im,modulus\n";
  for (int n = 0; n <= u.nt; ++n) {
    std::string t = format_full(time.node(n));
    for (int j = 0; j < u.m; ++j) {
      const Complex& v = u.at(n, j);
      out << t << ',' << (j + 1) << ',' << format_full(v.real()) << ','
          << format_full(v.imag()) << ',' << format_full(std::abs(v)) << '\n';
    }
  }
}

struct RunArtifacts {
  HumResult hum;
  Trajectory uncontrolled;
};

RunArtifacts run_backend(const ExperimentConfig& cfg, const HumBackend& backend,
                         const fs::path& dir) {
  const SpatialGrid& grid = backend.space();
  StateField y0 = named_field(cfg.initial, grid);

  HumConfig hum_cfg;
  hum_cfg.tol = cfg.tol;
  hum_cfg.k_max = cfg.k_max;
  hum_cfg.z_guess = named_field(cfg.z_guess, grid);

  RunArtifacts art{cg_solve(y0, backend, hum_cfg),
                   backend.averaged_forward(y0, nullptr)};

  write_field_csv(dir / "uncontrolled.csv", art.uncontrolled, backend.time());
  write_field_csv(dir / "controlled.csv", art.hum.controlled_average,
                  backend.time());
  write_control_csv(dir / "control.csv", art.hum.control, backend.time());

  {
    std::ofstream out = open_out(dir / "residuals.csv");
    out << "iteration,residual\n";
    for (std::size_t k = 0; k < art.hum.residual_trace.size(); ++k)
      out << k << ',' << format_full(art.hum.residual_trace[k]) << '\n';
  }
  {
    std::ofstream out = open_out(dir / "summary.txt");
    out << "terminal_error_h = " << format_full(art.hum.terminal_error) << '\n'
        << "terminal_error_max = " << format_full(art.hum.terminal_error_max)
        << '\n'
        << "control_norm = " << format_full(art.hum.control_norm) << '\n'
        << "iterations = " << art.hum.iterations << '\n'
        << "final_residual = " << format_full(art.hum.residual_trace.back())
        << '\n'
        << "converged = " << (art.hum.converged ? 1 : 0) << '\n'
        << "stagnation_warning = " << (art.hum.stagnation_warning ? 1 : 0)
        << '\n';
  }
  return art;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                 const std::string& out_dir) {
  cfg.validate();
  fs::path dir(out_dir);
  fs::create_directories(dir);

  SpatialGrid grid = SpatialGrid::with_control(cfg.length, cfg.nx,
                                               cfg.control_lo, cfg.control_hi);
  TimeGrid time{cfg.horizon, cfg.nt};

  {
    std::ofstream out = open_out(dir / "config.txt");
    out << config_to_text(cfg);
  }

  ExperimentOutcome outcome;
  outcome.directory = dir.string();

  const bool want_mc = cfg.backend != BackendKind::spectral;
  const bool want_spectral = cfg.backend != BackendKind::mc_fd;

  if (want_mc) {
    Ensemble ens = Ensemble::monte_carlo(cfg.distribution, cfg.samples, cfg.seed);
    {
      std::ofstream out = open_out(dir / "samples.csv");
      out << "index,alpha\n";
      for (int k = 0; k < ens.size; ++k)
        out << (k + 1) << ',' << format_full(ens.samples[k]) << '\n';
    }
    McFdBackend backend(std::move(ens), grid, time, Scheme::backward_euler,
                        false, cfg.threads);
    RunArtifacts art = run_backend(cfg, backend, dir);
    outcome.terminal_error = art.hum.terminal_error;
    outcome.terminal_error_max = art.hum.terminal_error_max;
    outcome.control_norm = art.hum.control_norm;
    outcome.iterations = art.hum.iterations;
    outcome.converged = art.hum.converged;
    emit_plot_script(dir.string());
  }

  if (want_spectral) {
    fs::path sdir = want_mc ? dir / "spectral" : dir;
    fs::create_directories(sdir);
    SpectralHumBackend backend(cfg.distribution, grid, time);
    RunArtifacts art = run_backend(cfg, backend, sdir);
    if (!want_mc) {
      outcome.terminal_error = art.hum.terminal_error;
      outcome.terminal_error_max = art.hum.terminal_error_max;
      outcome.control_norm = art.hum.control_norm;
      outcome.iterations = art.hum.iterations;
      outcome.converged = art.hum.converged;
      emit_plot_script(sdir.string());
    }
  }

  for (const auto& probe : cfg.probes) run_probe(probe, cfg, out_dir);
  return outcome;
}

ProbeReport run_probe(const std::string& name, const ExperimentConfig& cfg,
                      const std::string& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  SpatialGrid grid = SpatialGrid::with_control(cfg.length, cfg.nx,
                                               cfg.control_lo, cfg.control_hi);
  TimeGrid time{cfg.horizon, cfg.nt};
  int n_modes = cfg.n_modes > 0 ? cfg.n_modes : cfg.nx - 1;
  EigenBasis basis = dirichlet_eigenpairs(cfg.length, n_modes);

  ProbeReport report;
  if (name == "decay") {
    StateField z0 = named_field(cfg.initial, grid);
    ModeCoefficients coeffs = project(z0, basis, grid);
    std::vector<double> times;
    for (int n = 0; n <= cfg.nt; ++n) times.push_back(time.node(n));
    double lambda_split = basis.eigenvalue(std::max(0, n_modes / 4 - 1));
    bool expect = cfg.distribution.family() != Family::uniform;
    report = decay_probe(cfg.distribution, basis, coeffs, times, lambda_split,
                         expect);
  } else if (name == "exact_obs_defect") {
    report = exact_obs_defect(cfg.distribution, basis, cfg.horizon,
                              std::min(40, n_modes - 1));
  } else if (name == "zero_scan") {
    StateField y0 = named_field(cfg.initial, grid);
    report = simultaneous_zero_scan(y0, nullptr, grid, time);
  } else if (name == "spectral_inequality") {
    report = spectral_inequality_constant(basis, cfg.control_lo, cfg.control_hi,
                                          std::min(20, n_modes));
  } else if (name == "cost_blowup") {
    CostBlowupProblem problem{cfg.distribution, HypothesisParams{},
                              grid, cfg.nt, named_field(cfg.initial, grid),
                              cfg.samples, cfg.seed, HumConfig{}, cfg.threads};
    // Hypothesis parameters for the predicted exponent.
    switch (cfg.distribution.family()) {
      case Family::normal:
        problem.hyp = {cfg.distribution.variance() / 2.0, 2.0, 2.0, cfg.horizon};
        break;
      case Family::cauchy:
        problem.hyp = {cfg.distribution.scale(), 1.0, 1.0, cfg.horizon};
        break;
      case Family::stable:
        problem.hyp = {cfg.distribution.scale(), cfg.distribution.stability(),
                       cfg.distribution.stability(), cfg.horizon};
        break;
      default:
        problem.hyp = {1.0, 1.0, 1.0, cfg.horizon};
        break;
    }
    problem.hum.tol = cfg.tol;
    problem.hum.k_max = cfg.k_max;
    problem.hum.z_guess = named_field(cfg.z_guess, grid);
    std::vector<double> ladder;
    for (double f : {1.0, 0.75, 0.5, 0.375, 0.25}) ladder.push_back(cfg.horizon * f);
    report = cost_blowup_fit(problem, ladder);
  } else if (name == "hypothesis_h") {
    HypothesisParams params{1.0, 1.0, 1.0, 1.0};
    switch (cfg.distribution.family()) {
      case Family::normal:
        params = {cfg.distribution.variance() / 2.0, 2.0, 2.0, 1.0};
        break;
      case Family::cauchy:
        params = {cfg.distribution.scale(), 1.0, 1.0, 1.0};
        break;
      case Family::stable:
        params = {cfg.distribution.scale(), cfg.distribution.stability(),
                  cfg.distribution.stability(), 1.0};
        break;
      default:
        break;
    }
    HypothesisHCertificate cert =
        check_hypothesis_h(cfg.distribution, params, 50.0);
    report.name = "hypothesis_h";
    report.inputs = cfg.distribution.describe();
    report.measured = {{"c", cert.c},
                       {"r", cert.r},
                       {"theta", cert.theta},
                       {"max_violation", cert.max_violation},
                       {"lambda_at_max", cert.lambda_at_max},
                       {"t1_at_max", cert.t1_at_max},
                       {"t2_at_max", cert.t2_at_max},
                       {"skipped_points", static_cast<double>(cert.skipped_points)},
                       {"verified", cert.verified ? 1.0 : 0.0}};
    report.verdict = cert.verified ? Verdict::pass : Verdict::fail;
  } else {
    throw std::invalid_argument(
        "unknown probe '" + name +
        "' (available: decay, exact_obs_defect, zero_scan, "
        "spectral_inequality, cost_blowup, hypothesis_h)");
  }

  write_probe_report(report, out_dir);
  return report;
}

void write_probe_report(const ProbeReport& report, const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  {
    std::ofstream out = open_out(dir / (report.name + "_probe.csv"));
    out << "label,value\n";
    for (const auto& [label, value] : report.measured)
      out << label << ',' << format_full(value) << '\n';
  }
  {
    std::ofstream out = open_out(dir / (report.name + "_summary.txt"));
    out << "probe = " << report.name << '\n'
        << "inputs = " << report.inputs << '\n'
        << "verdict = " << verdict_name(report.verdict) << '\n';
    for (const auto& note : report.notes) out << "note = " << note << '\n';
  }
}

void emit_plot_script(const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  std::ofstream out = open_out(dir / "plots.py");
  out << R"PY(#!/usr/bin/env python3
"""Regenerates the figure set from the CSV artifacts in this directory."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def read_csv(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        print(f"skip: {name} not found", file=sys.stderr)
        return None
    with open(path) as f:
        rows = list(csv.DictReader(f))
    return rows


def surface(name, title, outfile, column="modulus"):
    rows = read_csv(name)
    if not rows:
        return
    times = sorted({float(r["time"]) for r in rows})
    nodes = sorted({int(r["node"]) for r in rows})
    z = np.zeros((len(times), len(nodes)))
    t_index = {t: i for i, t in enumerate(times)}
    for r in rows:
        z[t_index[float(r["time"])], int(r["node"]) - 1] = float(r[column])
    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(projection="3d")
    T, X = np.meshgrid(times, nodes, indexing="ij")
    ax.plot_surface(X, T, z, cmap="viridis")
    ax.set_xlabel("node")
    ax.set_ylabel("t")
    ax.set_zlabel(column)
    ax.set_title(title)
    fig.savefig(os.path.join(HERE, outfile), dpi=150, bbox_inches="tight")
    plt.close(fig)


def histogram():
    rows = read_csv("samples.csv")
    if not rows:
        return
    alphas = [float(r["alpha"]) for r in rows]
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.hist(alphas, bins=20)
    ax.set_xlabel("alpha")
    ax.set_title(f"diffusivity sample, M={len(alphas)}")
    fig.savefig(os.path.join(HERE, "fig_samples.png"), dpi=150,
                bbox_inches="tight")
    plt.close(fig)


def terminal_slice():
    rows = read_csv("controlled.csv")
    if not rows:
        return
    t_end = max(float(r["time"]) for r in rows)
    tail = [r for r in rows if float(r["time"]) == t_end]
    tail.sort(key=lambda r: int(r["node"]))
    nodes = [int(r["node"]) for r in tail]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(nodes, [float(r["modulus"]) for r in tail], label="modulus")
    ax.plot(nodes, [float(r["re"]) for r in tail], "--", label="real part")
    ax.set_xlabel("node")
    ax.set_title(f"averaged controlled state at t={t_end}")
    ax.legend()
    fig.savefig(os.path.join(HERE, "fig_terminal.png"), dpi=150,
                bbox_inches="tight")
    plt.close(fig)


histogram()
surface("uncontrolled.csv", "average of uncontrolled states",
        "fig_uncontrolled.png")
surface("control.csv", "computed control", "fig_control.png")
surface("controlled.csv", "average of controlled states",
        "fig_controlled.png")
terminal_slice()
print("figures written to", HERE)
)PY";
}

}  // namespace avgschro
