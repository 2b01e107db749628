#include "avgschro/grid.hpp"

#include <algorithm>
#include <cmath>

namespace avgschro {

SpatialGrid SpatialGrid::with_control(double length, int nx, double control_lo,
                                      double control_hi) {
  if (!(length > 0.0)) throw std::invalid_argument("grid length must be > 0");
  if (nx < 2) throw std::invalid_argument("grid needs at least 2 cells");
  if (!(0.0 <= control_lo && control_lo < control_hi && control_hi <= length))
    throw std::invalid_argument("control region must satisfy 0 <= lo < hi <= L");
  SpatialGrid g;
  g.length = length;
  g.nx = nx;
  g.control_mask.assign(nx - 1, 0);
  int marked = 0;
  for (int j = 0; j < nx - 1; ++j) {
    double x = g.node(j);
    if (x >= control_lo && x <= control_hi) {
      g.control_mask[j] = 1;
      ++marked;
    }
  }
  if (marked == 0)
    throw std::invalid_argument("control region contains no interior grid node");
  return g;
}

SpatialGrid SpatialGrid::full_control(double length, int nx) {
  return with_control(length, nx, 0.0, length);
}

bool SpatialGrid::full_domain_control() const {
  return std::all_of(control_mask.begin(), control_mask.end(),
                     [](std::uint8_t m) { return m != 0; });
}

int SpatialGrid::masked_count() const {
  int c = 0;
  for (auto m : control_mask) c += m;
  return c;
}

Complex inner_h(const StateField& a, const StateField& b, double dx) {
  Complex acc{};
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * std::conj(b[j]);
  return acc * dx;
}

double norm_h(const StateField& a, double dx) {
  double acc = 0.0;
  for (const auto& v : a) acc += std::norm(v);
  return std::sqrt(acc * dx);
}

double max_abs(const StateField& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

double spacetime_norm(const ControlField& u, const SpatialGrid& grid,
                      const TimeGrid& time) {
  double acc = 0.0;
  for (int n = 1; n <= u.nt; ++n)
    for (int j = 0; j < u.m; ++j) acc += std::norm(u.at(n, j));
  return std::sqrt(acc * grid.dx() * time.dt());
}

void axpy(Complex alpha, const StateField& x, StateField& y) {
  for (std::size_t j = 0; j < x.size(); ++j) y[j] += alpha * x[j];
}

}  // namespace avgschro
