#pragma once

#include <string>
#include <utility>
#include <vector>

#include "avgschro/distributions.hpp"
#include "avgschro/grid.hpp"
#include "avgschro/hum.hpp"
#include "avgschro/spectral.hpp"

namespace avgschro {

enum class Verdict { pass, fail, informative };

std::string verdict_name(Verdict v);

struct ProbeReport {
  std::string name;
  std::string inputs;
  std::vector<std::pair<std::string, double>> measured;
  Verdict verdict = Verdict::informative;
  std::vector<std::string> notes;

  double value(const std::string& label) const;  // throws if absent
};

/// Monotone decay of t -> ||E(z(t))|| for the projected, complementary and
/// full initial data, via the characteristic-function evolution. pass when
/// all three sequences are non-increasing over the time grid; informative for
/// laws outside the decay hypothesis.
ProbeReport decay_probe(const DistributionSpec& spec, const EigenBasis& basis,
                        const ModeCoefficients& z0,
                        const std::vector<double>& times, double lambda_split,
                        bool expect_monotone = true);

/// I_n = int_0^T |cf(lambda_n t)|^2 dt for n = 0..n_max. Exact averaged
/// observability would force I_n >= const > 0; the probe exhibits the
/// Riemann-Lebesgue collapse I_n -> 0.
ProbeReport exact_obs_defect(const DistributionSpec& spec,
                             const EigenBasis& basis, double horizon,
                             int n_max);

/// Scans g(xi) = ||y(T; xi; y0; u)||_h over a xi-grid with the exact
/// single-realization mode evolution (unitary; no scheme dissipation), counts
/// near-zero dips and checks each is isolated. The control field uses the
/// same discrete time quadrature as the solver. y0 must be nonzero.
struct ZeroScanSettings {
  double xi_lo = -5.0;
  double xi_hi = 5.0;
  double resolution = 1e-3;
  double threshold_rel = 1e-2;     // candidate when g < threshold_rel * ||y0||
  double isolation_factor = 10.0;  // bracket must rise above factor*threshold
  double max_bracket_width = 1e-2;
};

ProbeReport simultaneous_zero_scan(const StateField& y0, const ControlField* u,
                                   const SpatialGrid& grid, const TimeGrid& time,
                                   const ZeroScanSettings& settings = {});

/// Best constant K(lambda) = 1/sqrt(min eig of the G0-restricted Gram matrix)
/// of modes with eigenvalue <= lambda, for the first n_thresholds eigenvalue
/// ladder points. Measures growth compatible with the exp(C sqrt(lambda))
/// spectral inequality; always informative.
ProbeReport spectral_inequality_constant(const EigenBasis& basis,
                                         double control_lo, double control_hi,
                                         int n_thresholds);

/// Runs HUM on a decreasing horizon ladder and fits log(control_norm/||y0||)
/// against T^{-theta/(2r-1)}.
struct CostBlowupProblem {
  DistributionSpec spec;
  HypothesisParams hyp;  // supplies the predicted exponent
  SpatialGrid grid;
  int nt = 80;
  StateField y0;
  int ensemble_size = 50;
  std::uint64_t seed = 1;
  HumConfig hum;
  int threads = 1;
};

ProbeReport cost_blowup_fit(const CostBlowupProblem& problem,
                            const std::vector<double>& horizons);

}  // namespace avgschro
