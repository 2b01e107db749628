#pragma once

#include <vector>

#include "avgschro/distributions.hpp"
#include "avgschro/grid.hpp"

namespace avgschro {

/// Dirichlet eigenpairs of -d^2/dx^2 on (0, L):
/// lambda_n = ((n+1) pi / L)^2, e_n(x) = sqrt(2/L) sin((n+1) pi x / L).
struct EigenBasis {
  double length = 1.0;
  int n_modes = 1;

  double eigenvalue(int n) const;
  double eigenfunction(int n, double x) const;

  /// e_n sampled on the interior nodes of a matching grid.
  StateField mode_on_grid(int n, const SpatialGrid& grid) const;
};

EigenBasis dirichlet_eigenpairs(double length, int n_modes);

/// Fourier coefficients <field, e_n>_h, n = 0..n_modes-1.
using ModeCoefficients = std::vector<Complex>;

/// Trapezoid-rule sine coefficients on the grid (Dirichlet endpoints fixed at
/// zero make the trapezoid weights uniform). Exact inverse of synthesize for
/// n_modes <= nx-1; throws on n_modes >= nx (aliased modes).
ModeCoefficients project(const StateField& field, const EigenBasis& basis,
                         const SpatialGrid& grid);

StateField synthesize(const ModeCoefficients& coeffs, const EigenBasis& basis,
                      const SpatialGrid& grid);

/// Coefficients of the averaged time-reversed adjoint at time t: c_n *
/// cf(lambda_n t). For terminal-data adjoints evaluated at time t in [0,T],
/// call with argument T - t.
ModeCoefficients averaged_adjoint_evolve(const ModeCoefficients& z0,
                                         const DistributionSpec& spec,
                                         const EigenBasis& basis, double t);

/// Coefficients of the averaged free forward state at time t:
/// c_n * conj(cf(lambda_n t)) (the forward group contributes e^{-i xi lambda t}).
ModeCoefficients averaged_free_state(const ModeCoefficients& y0,
                                     const DistributionSpec& spec,
                                     const EigenBasis& basis, double t);

/// Mode-wise Gramian factors for full-domain observation: returns
/// c_n * int_0^T |cf(lambda_n (T-s))|^2 ds, the integral evaluated by
/// composite Simpson with nt_quad intervals. Serves as the reference for the
/// finite-difference Gramian when G0 = G; requires a full-domain control mask.
ModeCoefficients spectral_gramian_apply(const ModeCoefficients& z_t,
                                        const DistributionSpec& spec,
                                        const EigenBasis& basis, double horizon,
                                        int nt_quad,
                                        const SpatialGrid& grid);

/// int_0^T |cf(lambda t)|^2 dt by composite Simpson with nt_quad intervals.
double cf_energy_integral(const DistributionSpec& spec, double lambda,
                          double horizon, int nt_quad);

}  // namespace avgschro
