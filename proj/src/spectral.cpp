#include "avgschro/spectral.hpp"

#include <cmath>

namespace avgschro {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double EigenBasis::eigenvalue(int n) const {
  double k = (n + 1) * kPi / length;
  return k * k;
}

double EigenBasis::eigenfunction(int n, double x) const {
  return std::sqrt(2.0 / length) * std::sin((n + 1) * kPi * x / length);
}

StateField EigenBasis::mode_on_grid(int n, const SpatialGrid& grid) const {
  StateField v(grid.interior());
  for (int j = 0; j < grid.interior(); ++j) v[j] = eigenfunction(n, grid.node(j));
  return v;
}

EigenBasis dirichlet_eigenpairs(double length, int n_modes) {
  if (!(length > 0.0)) throw std::invalid_argument("basis length must be > 0");
  if (n_modes < 1) throw std::invalid_argument("need at least one mode");
  return {length, n_modes};
}

namespace {
void check_alias(const EigenBasis& basis, const SpatialGrid& grid) {
  if (std::abs(basis.length - grid.length) > 1e-12 * basis.length)
    throw std::invalid_argument("basis and grid lengths differ");
  if (basis.n_modes >= grid.nx)
    throw std::invalid_argument(
        "aliasing: n_modes must be at most nx-1 on a grid with nx cells");
}
}  // namespace

ModeCoefficients project(const StateField& field, const EigenBasis& basis,
                         const SpatialGrid& grid) {
  check_consistent(grid, field, "project");
  check_alias(basis, grid);
  ModeCoefficients c(basis.n_modes);
  double dx = grid.dx();
  for (int n = 0; n < basis.n_modes; ++n) {
    Complex acc{};
    for (int j = 0; j < grid.interior(); ++j)
      acc += field[j] * basis.eigenfunction(n, grid.node(j));
    c[n] = acc * dx;
  }
  return c;
}

StateField synthesize(const ModeCoefficients& coeffs, const EigenBasis& basis,
                      const SpatialGrid& grid) {
  check_alias(basis, grid);
  if (static_cast<int>(coeffs.size()) > basis.n_modes)
    throw std::invalid_argument("more coefficients than basis modes");
  StateField v(grid.interior(), Complex{});
  for (int n = 0; n < static_cast<int>(coeffs.size()); ++n) {
    if (coeffs[n] == Complex{}) continue;
    for (int j = 0; j < grid.interior(); ++j)
      v[j] += coeffs[n] * basis.eigenfunction(n, grid.node(j));
  }
  return v;
}

ModeCoefficients averaged_adjoint_evolve(const ModeCoefficients& z0,
                                         const DistributionSpec& spec,
                                         const EigenBasis& basis, double t) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  ModeCoefficients out(z0.size());
  for (std::size_t n = 0; n < z0.size(); ++n)
    out[n] = z0[n] * cf_eval(spec, basis.eigenvalue(static_cast<int>(n)) * t);
  return out;
}

ModeCoefficients averaged_free_state(const ModeCoefficients& y0,
                                     const DistributionSpec& spec,
                                     const EigenBasis& basis, double t) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  ModeCoefficients out(y0.size());
  for (std::size_t n = 0; n < y0.size(); ++n)
    out[n] = y0[n] *
             std::conj(cf_eval(spec, basis.eigenvalue(static_cast<int>(n)) * t));
  return out;
}

double cf_energy_integral(const DistributionSpec& spec, double lambda,
                          double horizon, int nt_quad) {
  if (nt_quad < 2) throw std::invalid_argument("nt_quad must be >= 2");
  int n = nt_quad + (nt_quad % 2);  // Simpson needs an even interval count
  double h = horizon / n;
  auto f = [&](double t) {
    double m = std::abs(cf_eval(spec, lambda * t));
    return m * m;
  };
  double acc = f(0.0) + f(horizon);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

ModeCoefficients spectral_gramian_apply(const ModeCoefficients& z_t,
                                        const DistributionSpec& spec,
                                        const EigenBasis& basis, double horizon,
                                        int nt_quad, const SpatialGrid& grid) {
  if (!grid.full_domain_control())
    throw std::invalid_argument(
        "spectral Gramian requires full-domain observation (G0 = G)");
  ModeCoefficients out(z_t.size());
  for (std::size_t n = 0; n < z_t.size(); ++n)
    out[n] = z_t[n] * cf_energy_integral(
                          spec, basis.eigenvalue(static_cast<int>(n)), horizon,
                          nt_quad);
  return out;
}

}  // namespace avgschro
