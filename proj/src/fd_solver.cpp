#include "avgschro/fd_solver.hpp"

#include <cmath>

namespace avgschro {

StateField second_difference_apply(const StateField& v, const SpatialGrid& grid) {
  check_consistent(grid, v, "second_difference_apply");
  int m = grid.interior();
  double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  StateField w(m);
  for (int j = 0; j < m; ++j) {
    Complex left = (j > 0) ? v[j - 1] : Complex{};
    Complex right = (j + 1 < m) ? v[j + 1] : Complex{};
    w[j] = (right - 2.0 * v[j] + left) * inv_dx2;
  }
  return w;
}

TridiagFactor::TridiagFactor(const std::vector<Complex>& diag,
                             const std::vector<Complex>& lower,
                             const std::vector<Complex>& upper)
    : lower_(diag.size() - 1), inv_diag_(diag.size()), upper_(upper) {
  const std::size_t n = diag.size();
  if (lower.size() != n - 1 || upper.size() != n - 1)
    throw std::invalid_argument("tridiagonal bands must have length n-1");
  Complex pivot = diag[0];
  if (pivot == Complex{}) throw NumericalError("thomas: zero pivot at row 0");
  inv_diag_[0] = 1.0 / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    lower_[i - 1] = lower[i - 1] * inv_diag_[i - 1];
    pivot = diag[i] - lower_[i - 1] * upper[i - 1];
    if (pivot == Complex{})
      throw NumericalError("thomas: zero pivot at row " + std::to_string(i));
    inv_diag_[i] = 1.0 / pivot;
  }
}

void TridiagFactor::solve_in_place(std::vector<Complex>& rhs) const {
  const std::size_t n = inv_diag_.size();
  if (rhs.size() != n) throw std::invalid_argument("thomas: rhs length mismatch");
  for (std::size_t i = 1; i < n; ++i) rhs[i] -= lower_[i - 1] * rhs[i - 1];
  rhs[n - 1] *= inv_diag_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - upper_[i] * rhs[i + 1]) * inv_diag_[i];
}

std::vector<Complex> thomas_solve(const std::vector<Complex>& diag,
                                  const std::vector<Complex>& lower,
                                  const std::vector<Complex>& upper,
                                  const std::vector<Complex>& rhs) {
  TridiagFactor f(diag, lower, upper);
  std::vector<Complex> x = rhs;
  f.solve_in_place(x);
  return x;
}

namespace {

// Bands of I + coeff * D2 on the interior nodes.
void shifted_laplacian_bands(Complex coeff, const SpatialGrid& grid,
                             std::vector<Complex>& diag,
                             std::vector<Complex>& off) {
  int m = grid.interior();
  double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  diag.assign(m, 1.0 - 2.0 * coeff * inv_dx2);
  off.assign(m - 1, coeff * inv_dx2);
}

// w = (I + coeff * D2) v
void apply_shifted_laplacian(Complex coeff, const SpatialGrid& grid,
                             const StateField& v, StateField& w) {
  int m = grid.interior();
  double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  w.resize(m);
  for (int j = 0; j < m; ++j) {
    Complex left = (j > 0) ? v[j - 1] : Complex{};
    Complex right = (j + 1 < m) ? v[j + 1] : Complex{};
    w[j] = v[j] + coeff * (right - 2.0 * v[j] + left) * inv_dx2;
  }
}

void check_control(const ControlField* u, const SpatialGrid& grid,
                   const TimeGrid& time) {
  if (!u) return;
  if (u->m != grid.interior() || u->nt != time.nt)
    throw std::invalid_argument("control field shape does not match grids");
}

}  // namespace

Trajectory forward_solve(double xi, const StateField& y0, const ControlField* u,
                         const SpatialGrid& grid, const TimeGrid& time,
                         Scheme scheme) {
  check_consistent(grid, y0, "forward_solve");
  check_control(u, grid, time);
  const int m = grid.interior();
  const double dt = time.dt();
  const Complex ixdt{0.0, xi * dt};

  // Implicit system (I - i xi dt_eff D2) with dt_eff = dt (BE) or dt/2 (CN).
  const Complex lhs_coeff = (scheme == Scheme::backward_euler) ? -ixdt : -0.5 * ixdt;
  std::vector<Complex> diag, off;
  shifted_laplacian_bands(lhs_coeff, grid, diag, off);
  TridiagFactor factor(diag, off, off);

  Trajectory traj(time.nt + 1);
  traj[0] = y0;
  StateField rhs(m);
  for (int n = 0; n < time.nt; ++n) {
    if (scheme == Scheme::backward_euler)
      rhs = traj[n];
    else
      apply_shifted_laplacian(0.5 * ixdt, grid, traj[n], rhs);
    if (u)
      for (int j = 0; j < m; ++j)
        if (grid.control_mask[j]) rhs[j] += dt * u->at(n + 1, j);
    factor.solve_in_place(rhs);
    traj[n + 1] = rhs;
  }
  return traj;
}

Trajectory adjoint_solve_discrete(double xi, const StateField& z_t,
                                  const SpatialGrid& grid, const TimeGrid& time,
                                  Scheme scheme, bool paper_mode) {
  check_consistent(grid, z_t, "adjoint_solve_discrete");
  const double dt = time.dt();
  const Complex ixdt{0.0, xi * dt};

  Trajectory traj(time.nt + 1);
  traj[time.nt] = z_t;

  if (paper_mode) {
    if (scheme != Scheme::backward_euler)
      throw std::invalid_argument("paper-mode adjoint exists only for backward Euler");
    // Independently discretized recursion: multiply by the forward matrix.
    for (int n = time.nt; n-- > 0;)
      apply_shifted_laplacian(-ixdt, grid, traj[n + 1], traj[n]);
    return traj;
  }

  if (scheme == Scheme::backward_euler) {
    // Conjugate transpose of (I - i xi dt D2)^{-1}: solve (I + i xi dt D2).
    std::vector<Complex> diag, off;
    shifted_laplacian_bands(ixdt, grid, diag, off);
    TridiagFactor factor(diag, off, off);
    for (int n = time.nt; n-- > 0;) {
      traj[n] = traj[n + 1];
      factor.solve_in_place(traj[n]);
    }
    return traj;
  }

  // Crank-Nicolson conjugate transpose: (I - ia D2) (I + ia D2)^{-1}.
  std::vector<Complex> diag, off;
  shifted_laplacian_bands(0.5 * ixdt, grid, diag, off);
  TridiagFactor factor(diag, off, off);
  StateField work;
  for (int n = time.nt; n-- > 0;) {
    work = traj[n + 1];
    factor.solve_in_place(work);
    apply_shifted_laplacian(-0.5 * ixdt, grid, work, traj[n]);
  }
  return traj;
}

}  // namespace avgschro
