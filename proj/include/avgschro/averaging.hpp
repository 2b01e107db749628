#pragma once

#include <cstdint>
#include <vector>

#include "avgschro/distributions.hpp"
#include "avgschro/fd_solver.hpp"
#include "avgschro/grid.hpp"

namespace avgschro {

/// A frozen set of diffusivity realizations with averaging weights summing
/// to 1. Monte Carlo ensembles draw sample k from the counter-based stream,
/// so sample k is the same for every ensemble size and worker count.
/// Quadrature ensembles carry deterministic nodes/weights of the exact
/// distribution average; they are used for sampling-free cross-validation.
struct Ensemble {
  DistributionSpec spec;
  int size = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples;
  std::vector<double> weights;

  static Ensemble monte_carlo(const DistributionSpec& spec, int m,
                              std::uint64_t seed);
  static Ensemble quadrature(const DistributionSpec& spec, int n_nodes);
};

/// Weighted ensemble average of forward trajectories, all time levels:
/// sum_k w_k * forward_solve(alpha_k, y0, u). Per-sample solves may run on
/// `threads` workers; the reduction is a fixed-order pairwise sum, so the
/// result is bit-identical for any worker count.
Trajectory mc_average_forward(const Ensemble& ens, const StateField& y0,
                              const ControlField* u, const SpatialGrid& grid,
                              const TimeGrid& time,
                              Scheme scheme = Scheme::backward_euler,
                              int threads = 1);

Trajectory mc_average_adjoint(const Ensemble& ens, const StateField& z_t,
                              const SpatialGrid& grid, const TimeGrid& time,
                              Scheme scheme = Scheme::backward_euler,
                              bool paper_mode = false, int threads = 1);

/// Monte Carlo statistical error bound trajectory_norm / sqrt(m).
double mc_error_bound(double trajectory_norm, int m);

}  // namespace avgschro
