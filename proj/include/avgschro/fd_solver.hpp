#pragma once

#include <vector>

#include "avgschro/distributions.hpp"
#include "avgschro/grid.hpp"

namespace avgschro {

enum class Scheme { backward_euler, crank_nicolson };

/// (v_{j+1} - 2 v_j + v_{j-1}) / dx^2 with Dirichlet virtual endpoints v_0 =
/// v_nx = 0.
StateField second_difference_apply(const StateField& v, const SpatialGrid& grid);

/// Solves a complex tridiagonal system by the Thomas elimination. diag has
/// length n, lower/upper length n-1, rhs length n. Throws NumericalError on a
/// zero pivot.
std::vector<Complex> thomas_solve(const std::vector<Complex>& diag,
                                  const std::vector<Complex>& lower,
                                  const std::vector<Complex>& upper,
                                  const std::vector<Complex>& rhs);

/// Reusable Thomas factorization for repeated solves against one matrix.
class TridiagFactor {
 public:
  TridiagFactor(const std::vector<Complex>& diag,
                const std::vector<Complex>& lower,
                const std::vector<Complex>& upper);
  void solve_in_place(std::vector<Complex>& rhs) const;

 private:
  std::vector<Complex> lower_;     // elimination multipliers
  std::vector<Complex> inv_diag_;  // reciprocal pivots
  std::vector<Complex> upper_;
};

/// Implicit march of the single-realization forward problem
///   (I - i xi dt D2) y^{n+1} = y^n + dt * mask .* u^{n+1}
/// (backward Euler; Crank-Nicolson as the optional second-order scheme).
/// Returns all nt+1 time levels. u may be null for the free evolution.
Trajectory forward_solve(double xi, const StateField& y0, const ControlField* u,
                         const SpatialGrid& grid, const TimeGrid& time,
                         Scheme scheme = Scheme::backward_euler);

/// Backward march of the adjoint from z^{nt} = z_t.  By default each step is
/// the conjugate transpose of the forward propagator, which makes the discrete
/// duality identity
///   <y^{nt}, z^{nt}>_h - <y^0, z^0>_h = dt * sum_{n=1..nt} <mask.*u^n, z^{n-1}>_h
/// hold to machine precision for any xi, u, z_t. With paper_mode the step is
/// the independently discretized recursion z^n = (I - i xi dt D2) z^{n+1},
/// which is consistent to O(dt) but only approximately dual.
Trajectory adjoint_solve_discrete(double xi, const StateField& z_t,
                                  const SpatialGrid& grid, const TimeGrid& time,
                                  Scheme scheme = Scheme::backward_euler,
                                  bool paper_mode = false);

}  // namespace avgschro
