#include "avgschro/averaging.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "avgschro/linalg.hpp"

namespace avgschro {

Ensemble Ensemble::monte_carlo(const DistributionSpec& spec, int m,
                               std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("ensemble size must be >= 1");
  Ensemble e{spec};
  e.size = m;
  e.seed = seed;
  e.samples.resize(m);
  e.weights.assign(m, 1.0 / m);
  for (int k = 0; k < m; ++k) e.samples[k] = sample(spec, seed, k + 1);
  return e;
}

namespace {
constexpr double kPi = 3.14159265358979323846;

// Deterministic nodes/weights for E[g(alpha)]. Normal, uniform and
// exponential map onto the classical Gauss rules; Cauchy uses the tangent
// substitution x0 + scale*tan(pi(v - 1/2)) with Gauss-Legendre in v; general
// stable laws integrate the inverted PDF on a truncated window and
// renormalize.
void quad_nodes(const DistributionSpec& spec, int n, std::vector<double>& nodes,
                std::vector<double>& weights) {
  switch (spec.family()) {
    case Family::normal: {
      QuadratureRule r = gauss_hermite(n);
      double m = spec.mean(), s = std::sqrt(2.0 * spec.variance());
      double inv = 1.0 / std::sqrt(kPi);
      for (int k = 0; k < n; ++k) {
        nodes.push_back(m + s * r.nodes[k]);
        weights.push_back(inv * r.weights[k]);
      }
      return;
    }
    case Family::uniform: {
      QuadratureRule r = gauss_legendre(n);
      double a = spec.lower(), b = spec.upper();
      for (int k = 0; k < n; ++k) {
        nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * r.nodes[k]);
        weights.push_back(0.5 * r.weights[k]);
      }
      return;
    }
    case Family::exponential: {
      QuadratureRule r = gauss_laguerre(n);
      for (int k = 0; k < n; ++k) {
        nodes.push_back(r.nodes[k] / spec.rate());
        weights.push_back(r.weights[k]);
      }
      return;
    }
    case Family::cauchy: {
      QuadratureRule r = gauss_legendre(n);
      double x0 = spec.location(), g = spec.scale();
      for (int k = 0; k < n; ++k) {
        double v = 0.5 * r.nodes[k];  // in (-1/2, 1/2)
        nodes.push_back(x0 + g * std::tan(kPi * v));
        weights.push_back(0.5 * r.weights[k]);
      }
      return;
    }
    case Family::stable: {
      QuadratureRule r = gauss_legendre(n);
      double c = spec.scale(), rr = spec.stability(), mu = spec.shift();
      double radius = 10.0 * std::pow(c, 1.0 / rr) * n;  // heavy-tail window
      double total = 0.0;
      for (int k = 0; k < n; ++k) {
        double x = mu + radius * r.nodes[k];
        double w = radius * r.weights[k] * pdf_eval(spec, x);
        nodes.push_back(x);
        weights.push_back(w);
        total += w;
      }
      for (auto& w : weights) w /= total;  // absorb truncated tail mass
      return;
    }
  }
}
}  // namespace

Ensemble Ensemble::quadrature(const DistributionSpec& spec, int n_nodes) {
  if (n_nodes < 1) throw std::invalid_argument("ensemble size must be >= 1");
  Ensemble e{spec};
  e.size = n_nodes;
  e.seed = 0;
  quad_nodes(spec, n_nodes, e.samples, e.weights);
  return e;
}

namespace {

// Streaming pairwise (binary-counter) accumulator over weighted trajectories.
// The merge tree depends only on the arrival index, never on scheduling.
class TrajectoryAccumulator {
 public:
  void add(Trajectory t) {
    levels_.push_back(std::move(t));
    ++count_;
    for (std::uint64_t c = count_; (c & 1) == 0; c >>= 1) {
      Trajectory top = std::move(levels_.back());
      levels_.pop_back();
      Trajectory& dst = levels_.back();
      for (std::size_t n = 0; n < dst.size(); ++n)
        for (std::size_t j = 0; j < dst[n].size(); ++j) dst[n][j] += top[n][j];
    }
  }

  Trajectory finish() {
    if (levels_.empty()) throw std::logic_error("empty accumulator");
    Trajectory acc = std::move(levels_.back());
    levels_.pop_back();
    while (!levels_.empty()) {
      Trajectory& next = levels_.back();
      for (std::size_t n = 0; n < acc.size(); ++n)
        for (std::size_t j = 0; j < acc[n].size(); ++j) acc[n][j] += next[n][j];
      levels_.pop_back();
    }
    return acc;
  }

 private:
  std::vector<Trajectory> levels_;
  std::uint64_t count_ = 0;
};

void scale_trajectory(Trajectory& t, double w) {
  for (auto& level : t)
    for (auto& v : level) v *= w;
}

template <typename SolveOne>
Trajectory averaged(const Ensemble& ens, int threads, SolveOne&& solve_one) {
  TrajectoryAccumulator acc;
  if (threads <= 1) {
    for (int k = 0; k < ens.size; ++k) {
      Trajectory t = solve_one(k);
      scale_trajectory(t, ens.weights[k]);
      acc.add(std::move(t));
    }
    return acc.finish();
  }
  // Solve in blocks of `threads`, then fold the block in sample order so the
  // reduction tree is identical to the serial one.
  std::vector<Trajectory> block(threads);
  for (int base = 0; base < ens.size; base += threads) {
    int blk = std::min(threads, ens.size - base);
    std::vector<std::thread> pool;
    pool.reserve(blk);
    for (int i = 0; i < blk; ++i)
      pool.emplace_back([&, i] {
        block[i] = solve_one(base + i);
        scale_trajectory(block[i], ens.weights[base + i]);
      });
    for (auto& th : pool) th.join();
    for (int i = 0; i < blk; ++i) acc.add(std::move(block[i]));
  }
  return acc.finish();
}

}  // namespace

Trajectory mc_average_forward(const Ensemble& ens, const StateField& y0,
                              const ControlField* u, const SpatialGrid& grid,
                              const TimeGrid& time, Scheme scheme, int threads) {
  return averaged(ens, threads, [&](int k) {
    try {
      return forward_solve(ens.samples[k], y0, u, grid, time, scheme);
    } catch (const NumericalError& err) {
      throw NumericalError("sample " + std::to_string(k + 1) + " (alpha=" +
                           std::to_string(ens.samples[k]) + "): " + err.what());
    }
  });
}

Trajectory mc_average_adjoint(const Ensemble& ens, const StateField& z_t,
                              const SpatialGrid& grid, const TimeGrid& time,
                              Scheme scheme, bool paper_mode, int threads) {
  return averaged(ens, threads, [&](int k) {
    try {
      return adjoint_solve_discrete(ens.samples[k], z_t, grid, time, scheme,
                                    paper_mode);
    } catch (const NumericalError& err) {
      throw NumericalError("sample " + std::to_string(k + 1) + " (alpha=" +
                           std::to_string(ens.samples[k]) + "): " + err.what());
    }
  });
}

double mc_error_bound(double trajectory_norm, int m) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  return trajectory_norm / std::sqrt(static_cast<double>(m));
}

}  // namespace avgschro
