#pragma once

#include <memory>
#include <string>
#include <vector>

#include "avgschro/averaging.hpp"
#include "avgschro/distributions.hpp"
#include "avgschro/fd_solver.hpp"
#include "avgschro/grid.hpp"
#include "avgschro/spectral.hpp"

namespace avgschro {

/// Raised when <Gramian p, p> turns negative beyond round-off, which signals
/// an inconsistent forward/adjoint pair (e.g. the paper-mode adjoint on a
/// coarse grid).
struct OperatorNotPsdError : NumericalError {
  using NumericalError::NumericalError;
};

/// Evolution backend used by the HUM layer: supplies the averaged adjoint
/// trajectory from a terminal datum and the averaged controlled forward
/// trajectory. Implementations must be deterministic and must represent a
/// fixed linear operator across calls (the conjugate gradient iteration
/// requires it).
class HumBackend {
 public:
  virtual ~HumBackend() = default;
  /// Averaged adjoint levels 0..nt from terminal datum z_t.
  virtual Trajectory averaged_adjoint(const StateField& z_t) const = 0;
  /// Averaged forward levels 0..nt from y0 under control u (null = free).
  virtual Trajectory averaged_forward(const StateField& y0,
                                      const ControlField* u) const = 0;
  virtual const SpatialGrid& space() const = 0;
  virtual const TimeGrid& time() const = 0;
};

/// Monte Carlo / finite-difference backend over a frozen ensemble.
class McFdBackend final : public HumBackend {
 public:
  McFdBackend(Ensemble ensemble, SpatialGrid grid, TimeGrid time,
              Scheme scheme = Scheme::backward_euler, bool paper_mode = false,
              int threads = 1);
  Trajectory averaged_adjoint(const StateField& z_t) const override;
  Trajectory averaged_forward(const StateField& y0,
                              const ControlField* u) const override;
  const SpatialGrid& space() const override { return grid_; }
  const TimeGrid& time() const override { return time_; }
  const Ensemble& ensemble() const { return ensemble_; }

 private:
  Ensemble ensemble_;
  SpatialGrid grid_;
  TimeGrid time_;
  Scheme scheme_;
  bool paper_mode_;
  int threads_;
};

/// Sampling-free backend: exact characteristic-function averaging in the
/// Dirichlet sine basis. Only supports full-domain control (the modes
/// decouple there); construction throws otherwise.
class SpectralHumBackend final : public HumBackend {
 public:
  SpectralHumBackend(DistributionSpec spec, SpatialGrid grid, TimeGrid time);
  Trajectory averaged_adjoint(const StateField& z_t) const override;
  Trajectory averaged_forward(const StateField& y0,
                              const ControlField* u) const override;
  const SpatialGrid& space() const override { return grid_; }
  const TimeGrid& time() const override { return time_; }
  const EigenBasis& basis() const { return basis_; }

 private:
  DistributionSpec spec_;
  SpatialGrid grid_;
  TimeGrid time_;
  EigenBasis basis_;
};

/// u^n = mask .* E(z)^{n-1} for n = 1..nt (slot 0 zero). The offset pairs each
/// control slot with the adjoint level produced by the discrete duality
/// identity, which is what makes the Gramian exactly Hermitian.
ControlField extract_control(const Trajectory& averaged_adjoint,
                             const SpatialGrid& grid);

/// Gramian applied to a terminal adjoint datum: averaged adjoint from z_t,
/// masked into a control, then the averaged forward terminal state from zero
/// initial datum.
StateField gramian_apply(const StateField& z_t, const HumBackend& backend);

/// J(z_t) = 1/2 * dt * sum_n ||mask .* E(z)^n||_h^2 + Re<y0, E(z)^0>_h.
double cost_functional(const StateField& z_t, const StateField& y0,
                       const HumBackend& backend);

struct HumConfig {
  double tol = 1e-5;
  int k_max = 100;
  StateField z_guess;  // sized to the grid; empty means zero
};

struct HumResult {
  StateField z_t_opt;
  ControlField control;
  std::vector<double> residual_trace;  // ||r_0||, ||r_1||, ...
  int iterations = 0;
  bool converged = false;
  bool stagnation_warning = false;
  double terminal_error = 0.0;      // ||E(y(T; y0; u))||_h
  double terminal_error_max = 0.0;  // max-modulus of the same field
  double control_norm = 0.0;        // sqrt(dt) aggregate of ||u^n||_h
  Trajectory controlled_average;    // E(y(.; y0; u)), all levels
};

/// Conjugate gradient on the Euler-Lagrange equation Lambda(z) = -E(y(T;y0;0)).
/// Stops when ||r||_h <= tol or after k_max iterations, then extracts the
/// control and recomputes the terminal error with one final averaged forward
/// solve.
HumResult cg_solve(const StateField& y0, const HumBackend& backend,
                   const HumConfig& config);

}  // namespace avgschro
