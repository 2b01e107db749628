#include <cmath>
#include <doctest.h>

#include "avgschro/averaging.hpp"
#include "avgschro/spectral.hpp"
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
}  // namespace

TEST_CASE("ensemble samples are stream-stable") {
  auto spec = DistributionSpec::cauchy(0, 1);
  Ensemble small = Ensemble::monte_carlo(spec, 10, 77);
  Ensemble big = Ensemble::monte_carlo(spec, 50, 77);
  for (int k = 0; k < 10; ++k) CHECK(small.samples[k] == big.samples[k]);
  Ensemble again = Ensemble::monte_carlo(spec, 10, 77);
  CHECK(again.samples == small.samples);
  double wsum = 0.0;
  for (double w : big.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature ensembles reproduce CF averages") {
  // E[e^{i s alpha}] computed through the weighted ensemble must match the
  // closed-form CF for the Gauss-backed families.
  // Gauss-Laguerre converges slowly on oscillatory integrands, hence the
  // looser tolerance for the exponential family.
  struct Case { DistributionSpec spec; double tol; };
  const Case cases[] = {{DistributionSpec::normal(0.4, 1.3), 1e-10},
                        {DistributionSpec::uniform(-1, 2), 1e-10},
                        {DistributionSpec::exponential(0.7), 2e-4}};
  for (const auto& [spec, tol] : cases) {
    Ensemble ens = Ensemble::quadrature(spec, 48);
    for (double s : {0.3, 1.0, 2.7}) {
      Complex acc{};
      for (int k = 0; k < ens.size; ++k)
        acc += ens.weights[k] * std::polar(1.0, s * ens.samples[k]);
      CHECK(std::abs(acc - cf_eval(spec, s)) < tol);
    }
  }
  // Cauchy via the tangent substitution converges too, if slowly.
  Ensemble cauchy = Ensemble::quadrature(DistributionSpec::cauchy(0, 1), 400);
  Complex acc{};
  for (int k = 0; k < cauchy.size; ++k)
    acc += cauchy.weights[k] * std::polar(1.0, 1.0 * cauchy.samples[k]);
  CHECK(std::abs(acc - cf_eval(DistributionSpec::cauchy(0, 1), 1.0)) < 5e-3);
}

TEST_CASE("M = 1 average is the single-realization trajectory") {
  SpatialGrid grid = SpatialGrid::full_control(1.0, 8);
  TimeGrid time{0.1, 4};
  auto spec = DistributionSpec::normal(0.7, 0.09);
  Ensemble ens = Ensemble::monte_carlo(spec, 1, 5);
  StateField y0 = sine_mode(grid);
  Trajectory avg = mc_average_forward(ens, y0, nullptr, grid, time);
  Trajectory single = forward_solve(ens.samples[0], y0, nullptr, grid, time);
  for (int n = 0; n <= time.nt; ++n)
    for (int j = 0; j < grid.interior(); ++j) CHECK(avg[n][j] == single[n][j]);

  // Near-frozen adjoint: constant in time.
  Ensemble frozen = Ensemble::monte_carlo(DistributionSpec::normal(0.0, 1e-32), 1, 5);
  Trajectory adj = mc_average_adjoint(frozen, y0, grid, time);
  for (int n = 0; n <= time.nt; ++n)
    for (int j = 0; j < grid.interior(); ++j)
      CHECK(std::abs(adj[n][j] - y0[j]) < 1e-10);
}

TEST_CASE("near-point-mass ensemble matches the single solve at the mean") {
  SpatialGrid grid = SpatialGrid::full_control(1.0, 16);
  TimeGrid time{0.2, 10};
  auto spec = DistributionSpec::normal(0.8, 1e-16);
  Ensemble ens = Ensemble::monte_carlo(spec, 32, 9);
  StateField y0 = sine_mode(grid);
  Trajectory avg = mc_average_forward(ens, y0, nullptr, grid, time);
  Trajectory ref = forward_solve(0.8, y0, nullptr, grid, time);
  for (int j = 0; j < grid.interior(); ++j)
    CHECK(std::abs(avg.back()[j] - ref.back()[j]) < 1e-6);
}

TEST_CASE("estimator is linear in initial state and control") {
  SpatialGrid grid = SpatialGrid::with_control(1.0, 10, 0.3, 0.9);
  TimeGrid time{0.3, 6};
  auto spec = DistributionSpec::uniform(-0.5, 1.5);
  Ensemble ens = Ensemble::monte_carlo(spec, 7, 21);
  oracles::TestRng rng(55);

  StateField a0(grid.interior()), b0(grid.interior());
  for (auto& v : a0) v = rng.complex_unit_box();
  for (auto& v : b0) v = rng.complex_unit_box();
  ControlField ua(time.nt, grid.interior()), ub(time.nt, grid.interior());
  for (int n = 1; n <= time.nt; ++n)
    for (int j = 0; j < grid.interior(); ++j)
      if (grid.control_mask[j]) {
        ua.at(n, j) = rng.complex_unit_box();
        ub.at(n, j) = rng.complex_unit_box();
      }

  Complex w{0.3, 0.4};
  StateField mix0(grid.interior());
  for (int j = 0; j < grid.interior(); ++j) mix0[j] = a0[j] + w * b0[j];
  ControlField mixu(time.nt, grid.interior());
  for (int n = 0; n <= time.nt; ++n)
    for (int j = 0; j < grid.interior(); ++j)
      mixu.at(n, j) = ua.at(n, j) + w * ub.at(n, j);

  Trajectory ya = mc_average_forward(ens, a0, &ua, grid, time);
  Trajectory yb = mc_average_forward(ens, b0, &ub, grid, time);
  Trajectory ym = mc_average_forward(ens, mix0, &mixu, grid, time);
  for (int n = 0; n <= time.nt; ++n)
    for (int j = 0; j < grid.interior(); ++j)
      CHECK(std::abs(ym[n][j] - (ya[n][j] + w * yb[n][j])) < 1e-12);
}

TEST_CASE("parallel averaging is bit-identical to serial") {
  SpatialGrid grid = SpatialGrid::with_control(1.0, 20, 0.25, 0.75);
  TimeGrid time{0.4, 16};
  auto spec = DistributionSpec::cauchy(0.0, 1.0);
  Ensemble ens = Ensemble::monte_carlo(spec, 23, 4242);
  StateField y0 = sine_mode(grid);
  Trajectory serial = mc_average_forward(ens, y0, nullptr, grid, time,
                                         Scheme::backward_euler, 1);
  for (int threads : {2, 3, 8}) {
    Trajectory par = mc_average_forward(ens, y0, nullptr, grid, time,
                                        Scheme::backward_euler, threads);
    bool identical = true;
    for (int n = 0; n <= time.nt; ++n)
      for (int j = 0; j < grid.interior(); ++j)
        if (par[n][j] != serial[n][j]) identical = false;
    CHECK(identical);
  }
}

TEST_CASE("averaged adjoint matches the spectral evolution on refined grids") {
  // A quadrature ensemble removes sampling error; what remains is the
  // O(dt) + O(dx^2) discretization gap.
  SpatialGrid grid = SpatialGrid::full_control(1.0, 64);
  TimeGrid time{0.3, 512};
  auto spec = DistributionSpec::normal(0.0, 1.0);
  Ensemble ens = Ensemble::quadrature(spec, 48);
  StateField z_t = sine_mode(grid);
  Trajectory avg = mc_average_adjoint(ens, z_t, grid, time);

  EigenBasis basis = dirichlet_eigenpairs(1.0, 4);
  ModeCoefficients c = project(z_t, basis, grid);
  for (int n : {0, 256, 512}) {
    ModeCoefficients ct =
        averaged_adjoint_evolve(c, spec, basis, time.horizon - time.node(n));
    StateField ref = synthesize(ct, basis, grid);
    StateField diff(grid.interior());
    for (int j = 0; j < grid.interior(); ++j) diff[j] = avg[n][j] - ref[j];
    CHECK(norm_h(diff, grid.dx()) < 5e-3);
  }
}

TEST_CASE("symmetric law with real terminal datum keeps the average real") {
  SpatialGrid grid = SpatialGrid::full_control(1.0, 12);
  TimeGrid time{0.2, 8};
  auto spec = DistributionSpec::normal(0.0, 2.0);
  Ensemble ens = Ensemble::quadrature(spec, 32);
  StateField z_t = sine_mode(grid);
  Trajectory avg = mc_average_adjoint(ens, z_t, grid, time);
  for (int n = 0; n <= time.nt; ++n)
    for (int j = 0; j < grid.interior(); ++j)
      CHECK(std::abs(avg[n][j].imag()) < 1e-12);
}

TEST_CASE("single-realization trajectories stay bounded for wild diffusivities") {
  // ||y(t)|| <= ||y0|| + sqrt(T)||u|| uniformly in xi, so Cauchy ensembles of
  // any spread produce well-defined averages.
  SpatialGrid grid = SpatialGrid::with_control(1.0, 12, 0.25, 0.75);
  TimeGrid time{0.5, 10};
  oracles::TestRng rng(91);
  StateField y0(grid.interior());
  for (auto& v : y0) v = rng.complex_unit_box();
  ControlField u(time.nt, grid.interior());
  for (int n = 1; n <= time.nt; ++n)
    for (int j = 0; j < grid.interior(); ++j)
      if (grid.control_mask[j]) u.at(n, j) = rng.complex_unit_box();
  double bound = norm_h(y0, grid.dx()) +
                 std::sqrt(time.horizon) * spacetime_norm(u, grid, time);
  for (double xi : {-1e6, -313.7, 0.001, 55.5, 2.4e7}) {
    Trajectory traj = forward_solve(xi, y0, &u, grid, time);
    for (const auto& level : traj)
      CHECK(norm_h(level, grid.dx()) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("mc_error_bound") {
  CHECK(mc_error_bound(1.0, 100) == doctest::Approx(0.1));
  CHECK(mc_error_bound(0.0, 7) == 0.0);
  CHECK(mc_error_bound(2.5, 1) == doctest::Approx(2.5));
  CHECK_THROWS_AS(mc_error_bound(1.0, 0), std::invalid_argument);
}

TEST_CASE("Monte Carlo deviation shrinks like 1/sqrt(M)") {
  SpatialGrid grid = SpatialGrid::full_control(1.0, 32);
  TimeGrid time{0.4, 64};
  auto spec = DistributionSpec::normal(0.0, 1.0);
  StateField y0 = sine_mode(grid);

  // Continuum average as reference; the discretization bias sits well below
  // the sampling error at these sample counts.
  EigenBasis basis = dirichlet_eigenpairs(1.0, 1);
  ModeCoefficients c = project(y0, basis, grid);
  StateField ref =
      synthesize(averaged_free_state(c, spec, basis, time.horizon), basis, grid);

  std::vector<double> log_m, log_err;
  for (int m : {8, 64, 512}) {
    double rms = 0.0;
    const int reps = 12;
    for (int rep = 0; rep < reps; ++rep) {
      Ensemble ens = Ensemble::monte_carlo(spec, m, 1000 + rep);
      Trajectory avg = mc_average_forward(ens, y0, nullptr, grid, time);
      StateField diff(grid.interior());
      for (int j = 0; j < grid.interior(); ++j) diff[j] = avg.back()[j] - ref[j];
      double e = norm_h(diff, grid.dx());
      rms += e * e;
    }
    log_m.push_back(std::log(double(m)));
    log_err.push_back(0.5 * std::log(rms / reps));
  }
  double slope = (log_err.back() - log_err.front()) / (log_m.back() - log_m.front());
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.4));
}
