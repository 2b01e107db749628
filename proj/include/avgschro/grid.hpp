#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace avgschro {

using Complex = std::complex<double>;

/// Complex-valued field on the interior nodes of a spatial grid.
using StateField = std::vector<Complex>;

/// One state snapshot per time level, indices 0..nt.
using Trajectory = std::vector<StateField>;

/// Uniform grid on (0, length) with Dirichlet endpoints. The state lives on
/// the nx-1 interior nodes x_j = j*dx, j = 1..nx-1; endpoints are fixed at 0
/// and never stored. The control mask marks the interior nodes inside G0.
struct SpatialGrid {
  double length = 1.0;
  int nx = 2;                              // number of cells
  std::vector<std::uint8_t> control_mask;  // size nx-1, 1 inside G0

  double dx() const { return length / nx; }
  int interior() const { return nx - 1; }
  double node(int j) const { return dx() * (j + 1); }  // j = 0..nx-2

  /// Grid with nodal mask m_j = 1 iff x_j in [control_lo, control_hi].
  static SpatialGrid with_control(double length, int nx, double control_lo,
                                  double control_hi);
  /// Grid observed/controlled on the whole domain.
  static SpatialGrid full_control(double length, int nx);

  bool full_domain_control() const;
  int masked_count() const;
};

struct TimeGrid {
  double horizon = 1.0;
  int nt = 1;

  double dt() const { return horizon / nt; }
  double node(int n) const { return dt() * n; }
};

/// Space-time control array with nt+1 time slots of interior-node values.
/// Slot n holds the source applied during the step t_{n-1} -> t_n, so slot 0
/// is unused and kept zero. Off-mask entries are zero.
struct ControlField {
  int nt = 0;
  int m = 0;  // interior node count
  std::vector<Complex> data;

  ControlField() = default;
  ControlField(int nt_, int m_) : nt(nt_), m(m_), data((nt_ + 1) * m_, Complex{}) {}

  Complex& at(int n, int j) { return data[static_cast<std::size_t>(n) * m + j]; }
  const Complex& at(int n, int j) const {
    return data[static_cast<std::size_t>(n) * m + j];
  }
};

/// Discrete Hermitian product dx * sum_j a_j * conj(b_j); linear in the first
/// argument, conjugate-linear in the second.
Complex inner_h(const StateField& a, const StateField& b, double dx);

/// Discrete L2 norm sqrt(dx * sum |a_j|^2).
double norm_h(const StateField& a, double dx);

double max_abs(const StateField& a);

/// sqrt(dt * sum_{n=1..nt} ||u^n||_h^2), the discrete L2((0,T)xG) norm of a
/// control field.
double spacetime_norm(const ControlField& u, const SpatialGrid& grid,
                      const TimeGrid& time);

void axpy(Complex alpha, const StateField& x, StateField& y);

inline void check_consistent(const SpatialGrid& grid, const StateField& v,
                             const char* what) {
  if (static_cast<int>(v.size()) != grid.interior())
    throw std::invalid_argument(std::string(what) +
                                ": field size does not match grid interior");
}

}  // namespace avgschro
