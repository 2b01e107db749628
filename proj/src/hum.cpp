#include "avgschro/hum.hpp"

#include <cmath>

namespace avgschro {

McFdBackend::McFdBackend(Ensemble ensemble, SpatialGrid grid, TimeGrid time,
                         Scheme scheme, bool paper_mode, int threads)
    : ensemble_(std::move(ensemble)),
      grid_(std::move(grid)),
      time_(time),
      scheme_(scheme),
      paper_mode_(paper_mode),
      threads_(threads) {}

Trajectory McFdBackend::averaged_adjoint(const StateField& z_t) const {
  return mc_average_adjoint(ensemble_, z_t, grid_, time_, scheme_, paper_mode_,
                            threads_);
}

Trajectory McFdBackend::averaged_forward(const StateField& y0,
                                         const ControlField* u) const {
  return mc_average_forward(ensemble_, y0, u, grid_, time_, scheme_, threads_);
}

SpectralHumBackend::SpectralHumBackend(DistributionSpec spec, SpatialGrid grid,
                                       TimeGrid time)
    : spec_(std::move(spec)),
      grid_(std::move(grid)),
      time_(time),
      basis_(dirichlet_eigenpairs(grid_.length, grid_.interior())) {
  if (!grid_.full_domain_control())
    throw std::invalid_argument(
        "spectral backend requires full-domain control (G0 = G)");
}

Trajectory SpectralHumBackend::averaged_adjoint(const StateField& z_t) const {
  ModeCoefficients c = project(z_t, basis_, grid_);
  Trajectory traj(time_.nt + 1);
  for (int n = 0; n <= time_.nt; ++n) {
    ModeCoefficients cn = averaged_adjoint_evolve(
        c, spec_, basis_, time_.horizon - time_.node(n));
    traj[n] = synthesize(cn, basis_, grid_);
  }
  return traj;
}

Trajectory SpectralHumBackend::averaged_forward(const StateField& y0,
                                                const ControlField* u) const {
  ModeCoefficients a = project(y0, basis_, grid_);
  const int modes = basis_.n_modes;
  const double dt = time_.dt();

  // Mode coefficients of each control slot; slot m acts over (t_{m-1}, t_m]
  // and is propagated by conj(cf(lambda (t_n - t_{m-1}))) to later levels.
  std::vector<ModeCoefficients> uc;
  if (u) {
    uc.resize(time_.nt + 1);
    StateField slot(grid_.interior());
    for (int m = 1; m <= time_.nt; ++m) {
      for (int j = 0; j < grid_.interior(); ++j) slot[j] = u->at(m, j);
      uc[m] = project(slot, basis_, grid_);
    }
  }

  Trajectory traj(time_.nt + 1);
  for (int n = 0; n <= time_.nt; ++n) {
    ModeCoefficients cn = averaged_free_state(a, spec_, basis_, time_.node(n));
    if (u) {
      for (int m = 1; m <= n; ++m) {
        double lag = time_.node(n) - time_.node(m - 1);
        for (int k = 0; k < modes; ++k)
          cn[k] += dt * std::conj(cf_eval(spec_, basis_.eigenvalue(k) * lag)) *
                   uc[m][k];
      }
    }
    traj[n] = synthesize(cn, basis_, grid_);
  }
  return traj;
}

ControlField extract_control(const Trajectory& averaged_adjoint,
                             const SpatialGrid& grid) {
  if (averaged_adjoint.empty())
    throw std::invalid_argument("extract_control: empty trajectory");
  int nt = static_cast<int>(averaged_adjoint.size()) - 1;
  int m = grid.interior();
  ControlField u(nt, m);
  for (int n = 1; n <= nt; ++n) {
    const StateField& z = averaged_adjoint[n - 1];
    check_consistent(grid, z, "extract_control");
    for (int j = 0; j < m; ++j)
      if (grid.control_mask[j]) u.at(n, j) = z[j];
  }
  return u;
}

StateField gramian_apply(const StateField& z_t, const HumBackend& backend) {
  Trajectory adjoint = backend.averaged_adjoint(z_t);
  ControlField u = extract_control(adjoint, backend.space());
  StateField zero(backend.space().interior(), Complex{});
  Trajectory forward = backend.averaged_forward(zero, &u);
  return forward.back();
}

double cost_functional(const StateField& z_t, const StateField& y0,
                       const HumBackend& backend) {
  const SpatialGrid& grid = backend.space();
  check_consistent(grid, z_t, "cost_functional");
  check_consistent(grid, y0, "cost_functional");
  Trajectory adjoint = backend.averaged_adjoint(z_t);
  const double dx = grid.dx();
  const double dt = backend.time().dt();
  double quad = 0.0;
  for (int n = 0; n < backend.time().nt; ++n)
    for (int j = 0; j < grid.interior(); ++j)
      if (grid.control_mask[j]) quad += std::norm(adjoint[n][j]);
  return 0.5 * dt * dx * quad + inner_h(y0, adjoint.front(), dx).real();
}

HumResult cg_solve(const StateField& y0, const HumBackend& backend,
                   const HumConfig& config) {
  const SpatialGrid& grid = backend.space();
  check_consistent(grid, y0, "cg_solve");
  if (!(config.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (config.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  const double dx = grid.dx();
  const int m = grid.interior();

  StateField z = config.z_guess.empty() ? StateField(m, Complex{})
                                        : config.z_guess;
  check_consistent(grid, z, "cg_solve z_guess");

  StateField free_terminal = backend.averaged_forward(y0, nullptr).back();

  // r = -E(y(T; y0; 0)) - Lambda(z)
  StateField r = gramian_apply(z, backend);
  for (int j = 0; j < m; ++j) r[j] = -free_terminal[j] - r[j];

  HumResult result;
  double rnorm2 = inner_h(r, r, dx).real();
  result.residual_trace.push_back(std::sqrt(rnorm2));

  StateField p = r;
  int consecutive_growth = 0;
  int k = 0;
  if (!std::isfinite(rnorm2))
    throw NumericalError("non-finite initial residual (divergent backend)");

  while (result.residual_trace.back() > config.tol && k < config.k_max) {
    StateField q = gramian_apply(p, backend);
    double pq = inner_h(q, p, dx).real();
    double pscale = inner_h(p, p, dx).real();
    if (!std::isfinite(pq))
      throw NumericalError(
          "non-finite <Gramian p, p>: the averaged adjoint diverged "
          "(paper-mode adjoints are unstable on stiff grids)");
    if (pq <= 0.0) {
      if (pq < -1e-12 * pscale)
        throw OperatorNotPsdError(
            "<Gramian p, p> = " + std::to_string(pq) +
            " < 0: forward/adjoint pair is not a Hermitian PSD operator");
      result.stagnation_warning = true;  // exact kernel direction; cannot advance
      break;
    }
    double a = rnorm2 / pq;
    for (int j = 0; j < m; ++j) {
      z[j] += a * p[j];
      r[j] -= a * q[j];
    }
    double rnorm2_next = inner_h(r, r, dx).real();
    ++k;
    result.residual_trace.push_back(std::sqrt(rnorm2_next));
    if (std::sqrt(rnorm2_next) <= config.tol) {
      rnorm2 = rnorm2_next;
      break;
    }
    double b = rnorm2_next / rnorm2;
    consecutive_growth = (b >= 1.0) ? consecutive_growth + 1 : 0;
    if (consecutive_growth >= 5) result.stagnation_warning = true;
    for (int j = 0; j < m; ++j) p[j] = r[j] + b * p[j];
    rnorm2 = rnorm2_next;
  }

  result.iterations = k;
  result.converged = result.residual_trace.back() <= config.tol;
  result.z_t_opt = std::move(z);

  Trajectory adjoint = backend.averaged_adjoint(result.z_t_opt);
  result.control = extract_control(adjoint, grid);
  result.controlled_average = backend.averaged_forward(y0, &result.control);
  const StateField& terminal = result.controlled_average.back();
  result.terminal_error = norm_h(terminal, dx);
  result.terminal_error_max = max_abs(terminal);
  result.control_norm = spacetime_norm(result.control, grid, backend.time());
  return result;
}

}  // namespace avgschro
