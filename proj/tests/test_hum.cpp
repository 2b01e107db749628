#include <cmath>
#include <doctest.h>

#include "avgschro/hum.hpp"
#include "oracles.hpp"

using namespace avgschro;

namespace {
constexpr double kPi = 3.14159265358979323846;

StateField sine_mode(const SpatialGrid& grid) {
  StateField f(grid.interior());
  for (int j = 0; j < grid.interior(); ++j)
    f[j] = std::sin(kPi * grid.node(j) / grid.length);
  return f;
}

McFdBackend small_backend(double t = 0.25, int nt = 5,
                          double lo = 0.25, double hi = 0.75) {
  SpatialGrid grid = SpatialGrid::with_control(1.0, 8, lo, hi);
  TimeGrid time{t, nt};
  Ensemble ens = Ensemble::monte_carlo(DistributionSpec::normal(0, 1), 6, 314);
  return McFdBackend(std::move(ens), std::move(grid), time);
}
}  // namespace

TEST_CASE("extract_control masks and staggers the averaged adjoint") {
  SpatialGrid full = SpatialGrid::full_control(1.0, 6);
  SpatialGrid masked = SpatialGrid::with_control(1.0, 40, 0.25, 0.75);

  oracles::TestRng rng(3);
  Trajectory traj(4);
  for (auto& level : traj) {
    level.resize(full.interior());
    for (auto& v : level) v = rng.complex_unit_box();
  }
  ControlField u = extract_control(traj, full);
  CHECK(u.nt == 3);
  for (int j = 0; j < full.interior(); ++j) {
    CHECK(u.at(0, j) == Complex{});             // slot 0 unused
    CHECK(u.at(1, j) == traj[0][j]);            // slot n pairs with level n-1
    CHECK(u.at(3, j) == traj[2][j]);
  }

  // Test-1 mask: interior nodes 10..30 of a 40-cell grid.
  for (int j = 0; j < masked.interior(); ++j) {
    bool inside = (j + 1) >= 10 && (j + 1) <= 30;
    CHECK(static_cast<bool>(masked.control_mask[j]) == inside);
  }

  Trajectory zeros(3, StateField(masked.interior(), Complex{}));
  ControlField zu = extract_control(zeros, masked);
  for (int n = 0; n <= zu.nt; ++n)
    for (int j = 0; j < zu.m; ++j) CHECK(zu.at(n, j) == Complex{});
}

TEST_CASE("gramian: zero datum, PSD quadratic form, Hermitian symmetry") {
  McFdBackend backend = small_backend();
  const SpatialGrid& grid = backend.space();
  const double dx = grid.dx();
  const double dt = backend.time().dt();

  StateField zero(grid.interior(), Complex{});
  StateField out = gramian_apply(zero, backend);
  for (const auto& v : out) CHECK(std::abs(v) == 0.0);

  oracles::TestRng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    StateField a(grid.interior()), b(grid.interior());
    for (auto& v : a) v = rng.complex_unit_box();
    for (auto& v : b) v = rng.complex_unit_box();

    StateField la = gramian_apply(a, backend);
    StateField lb = gramian_apply(b, backend);

    // <Lambda a, a> equals the space-time quadrature of the masked averaged
    // adjoint (the identity behind the cost functional).
    Complex quad_form = inner_h(la, a, dx);
    Trajectory adj = backend.averaged_adjoint(a);
    double direct = 0.0;
    for (int n = 0; n < backend.time().nt; ++n)
      for (int j = 0; j < grid.interior(); ++j)
        if (grid.control_mask[j]) direct += std::norm(adj[n][j]);
    direct *= dt * dx;
    CHECK(quad_form.real() >= -1e-12);
    CHECK(std::abs(quad_form - Complex{direct, 0.0}) <=
          1e-10 * std::max(1.0, direct));

    Complex sym_gap = inner_h(la, b, dx) - std::conj(inner_h(lb, a, dx));
    double scale = norm_h(a, dx) * norm_h(b, dx);
    CHECK(std::abs(sym_gap) <= 1e-10 * scale);
  }
}

TEST_CASE("duality bookkeeping: <y0, E z(0)> = <E y(T;y0;0), z_T>") {
  McFdBackend backend = small_backend();
  const SpatialGrid& grid = backend.space();
  oracles::TestRng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    StateField y0(grid.interior()), z_t(grid.interior());
    for (auto& v : y0) v = rng.complex_unit_box();
    for (auto& v : z_t) v = rng.complex_unit_box();
    Complex lhs = inner_h(y0, backend.averaged_adjoint(z_t)[0], grid.dx());
    Complex rhs = inner_h(backend.averaged_forward(y0, nullptr).back(), z_t,
                          grid.dx());
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + std::abs(rhs) + 1.0));
  }
}

TEST_CASE("cost functional: zero datum, nonnegativity, optimality at the solution") {
  McFdBackend backend = small_backend();
  const SpatialGrid& grid = backend.space();
  StateField zero(grid.interior(), Complex{});
  CHECK(cost_functional(zero, zero, backend) == 0.0);

  oracles::TestRng rng(29);
  for (int rep = 0; rep < 5; ++rep) {
    StateField z(grid.interior());
    for (auto& v : z) v = rng.complex_unit_box();
    CHECK(cost_functional(z, zero, backend) >= 0.0);
  }

  // First-order optimality at the converged iterate: random small
  // perturbations cannot decrease J by more than tol * ||h||.
  StateField y0 = sine_mode(grid);
  HumConfig cfg;
  cfg.tol = 1e-9;
  cfg.k_max = 60;
  HumResult res = cg_solve(y0, backend, cfg);
  double j_opt = cost_functional(res.z_t_opt, y0, backend);
  for (int rep = 0; rep < 5; ++rep) {
    StateField h(grid.interior());
    for (auto& v : h) v = 1e-4 * rng.complex_unit_box();
    StateField zh = res.z_t_opt;
    for (int j = 0; j < grid.interior(); ++j) zh[j] += h[j];
    double jh = cost_functional(zh, y0, backend);
    CHECK(jh - j_opt >= -2.0 * cfg.tol * norm_h(h, grid.dx()) - 1e-14);
  }
}

TEST_CASE("cg: trivial data converges immediately with zero control") {
  McFdBackend backend = small_backend();
  const SpatialGrid& grid = backend.space();
  StateField zero(grid.interior(), Complex{});
  HumConfig cfg;  // z_guess empty = zero
  HumResult res = cg_solve(zero, backend, cfg);
  CHECK(res.iterations == 0);
  CHECK(res.converged);
  CHECK(res.terminal_error == 0.0);
  CHECK(res.control_norm == 0.0);
  for (int n = 0; n <= res.control.nt; ++n)
    for (int j = 0; j < res.control.m; ++j)
      CHECK(res.control.at(n, j) == Complex{});
}

TEST_CASE("cg matches a dense solve of the explicit Gramian matrix") {
  // Mild CF decay keeps the Gramian well conditioned so both routes resolve
  // the same solution sharply.
  SpatialGrid grid = SpatialGrid::with_control(1.0, 8, 0.25, 0.75);
  TimeGrid time{0.1, 5};
  Ensemble ens = Ensemble::monte_carlo(DistributionSpec::normal(0.0, 0.02), 8, 99);
  McFdBackend backend(std::move(ens), grid, time);
  const int m = grid.interior();

  // Columns of Lambda from unit basis vectors.
  std::vector<Complex> dense(m * m);
  for (int col = 0; col < m; ++col) {
    StateField e(m, Complex{});
    e[col] = 1.0;
    StateField le = gramian_apply(e, backend);
    for (int row = 0; row < m; ++row) dense[row * m + col] = le[row];
  }

  StateField y0 = sine_mode(grid);
  StateField b = backend.averaged_forward(y0, nullptr).back();
  std::vector<Complex> rhs(m);
  for (int j = 0; j < m; ++j) rhs[j] = -b[j];
  auto direct = oracles::dense_solve(dense, rhs);

  HumConfig cfg;
  cfg.tol = 1e-13;
  cfg.k_max = 400;
  HumResult res = cg_solve(y0, backend, cfg);

  double num = 0.0, den = 0.0;
  for (int j = 0; j < m; ++j) {
    num += std::norm(res.z_t_opt[j] - direct[j]);
    den += std::norm(direct[j]);
  }
  CHECK(std::sqrt(num / den) < 1e-8);
}

TEST_CASE("terminal error equals the final residual by linearity") {
  McFdBackend backend = small_backend(0.3, 8);
  StateField y0 = sine_mode(backend.space());
  HumConfig cfg;
  cfg.tol = 1e-6;
  cfg.k_max = 80;
  cfg.z_guess = sine_mode(backend.space());
  HumResult res = cg_solve(y0, backend, cfg);
  CHECK(res.converged);
  // E(y(T;y0;u)) = E(y(T;y0;0)) + Lambda(z) = -r, so the two error readings
  // agree to round-off.
  CHECK(res.terminal_error ==
        doctest::Approx(res.residual_trace.back()).epsilon(1e-8));
  CHECK(res.terminal_error <= cfg.tol * (1.0 + 1e-10));
  // Residual trace ends below tol and starts above it.
  CHECK(res.residual_trace.front() > cfg.tol);
}

TEST_CASE("tightening the tolerance does not worsen the terminal error") {
  McFdBackend backend = small_backend(0.3, 8);
  StateField y0 = sine_mode(backend.space());
  HumConfig loose, tight;
  loose.tol = 1e-4;
  tight.tol = 1e-5;
  loose.k_max = tight.k_max = 100;
  double e_loose = cg_solve(y0, backend, loose).terminal_error;
  double e_tight = cg_solve(y0, backend, tight).terminal_error;
  CHECK(e_tight <= e_loose * (1.0 + 1e-12));
}

TEST_CASE("spectral backend agrees with the FD backend under refinement") {
  // Full-domain control, single mode; quadrature ensemble removes sampling
  // noise so the gap is pure discretization.
  SpatialGrid grid = SpatialGrid::full_control(1.0, 64);
  TimeGrid time{0.4, 256};
  auto spec = DistributionSpec::normal(0, 1);
  Ensemble ens = Ensemble::quadrature(spec, 48);
  McFdBackend fd(std::move(ens), grid, time);
  SpectralHumBackend sp(spec, grid, time);

  StateField z = sine_mode(grid);
  StateField via_fd = gramian_apply(z, fd);
  StateField via_sp = gramian_apply(z, sp);
  StateField diff(grid.interior());
  for (int j = 0; j < grid.interior(); ++j) diff[j] = via_fd[j] - via_sp[j];
  CHECK(norm_h(diff, grid.dx()) < 5e-3 * norm_h(via_sp, grid.dx()));
}

TEST_CASE("spectral backend Gramian factor matches the quadrature oracle") {
  SpatialGrid grid = SpatialGrid::full_control(1.0, 32);
  TimeGrid time{0.4, 2048};
  auto spec = DistributionSpec::normal(0, 1);
  SpectralHumBackend backend(spec, grid, time);
  StateField e0 = sine_mode(grid);
  StateField out = gramian_apply(e0, backend);
  Complex factor = inner_h(out, e0, grid.dx()) / inner_h(e0, e0, grid.dx());
  // Left-endpoint-in-time quadrature converges O(dt) to the integral.
  CHECK(factor.real() == doctest::Approx(0.08979355894093614).epsilon(2e-3));
  CHECK(std::abs(factor.imag()) < 1e-12);
}

TEST_CASE("spectral backend requires full-domain control") {
  SpatialGrid masked = SpatialGrid::with_control(1.0, 8, 0.25, 0.75);
  CHECK_THROWS_AS(
      SpectralHumBackend(DistributionSpec::normal(0, 1), masked, TimeGrid{0.1, 2}),
      std::invalid_argument);
}

TEST_CASE("paper-mode adjoint breaks the Gramian's Hermitian symmetry") {
  SpatialGrid grid = SpatialGrid::with_control(1.0, 8, 0.25, 0.75);
  TimeGrid time{0.25, 5};
  Ensemble ens = Ensemble::monte_carlo(DistributionSpec::normal(0, 1), 6, 314);
  McFdBackend exact(ens, grid, time, Scheme::backward_euler, false);
  McFdBackend naive(ens, grid, time, Scheme::backward_euler, true);

  oracles::TestRng rng(47);
  StateField a(grid.interior()), b(grid.interior());
  for (auto& v : a) v = rng.complex_unit_box();
  for (auto& v : b) v = rng.complex_unit_box();
  double scale = norm_h(a, grid.dx()) * norm_h(b, grid.dx());

  auto symmetry_gap = [&](const HumBackend& backend) {
    Complex la_b = inner_h(gramian_apply(a, backend), b, grid.dx());
    Complex lb_a = inner_h(gramian_apply(b, backend), a, grid.dx());
    return std::abs(la_b - std::conj(lb_a)) / scale;
  };
  CHECK(symmetry_gap(exact) < 1e-10);
  CHECK(symmetry_gap(naive) > 1e-4);
}

TEST_CASE("paper-mode divergence on stiff grids is reported, not propagated") {
  // The explicit backward recursion amplifies mode m by |1 + i xi dt lam_m|
  // per step, which overflows on the production grid; cg_solve must fail
  // loudly instead of returning NaNs.
  SpatialGrid grid = SpatialGrid::with_control(1.0, 40, 0.25, 0.75);
  TimeGrid time{0.4, 80};
  Ensemble ens = Ensemble::monte_carlo(DistributionSpec::normal(0, 1), 8, 19);
  McFdBackend naive(std::move(ens), grid, time, Scheme::backward_euler, true);
  HumConfig cfg;
  cfg.z_guess = sine_mode(grid);
  CHECK_THROWS_AS(cg_solve(sine_mode(grid), naive, cfg), NumericalError);
}
