#include "avgschro/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace avgschro {

SymmetricEigen symmetric_eigen(std::vector<double> a, int n) {
  if (static_cast<int>(a.size()) != n * n)
    throw std::invalid_argument("symmetric_eigen: storage size mismatch");
  std::vector<double> v(n * n, 0.0);
  for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    return std::sqrt(2.0 * s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > 1e-14; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        double app = a[p * n + p], aqq = a[q * n + q];
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a[i * n + i] < a[j * n + j]; });

  SymmetricEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors.assign(n * n, 0.0);
  for (int k = 0; k < n; ++k) {
    out.eigenvalues[k] = a[order[k] * n + order[k]];
    for (int i = 0; i < n; ++i) out.eigenvectors[i * n + k] = v[i * n + order[k]];
  }
  return out;
}

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// orthogonal-polynomial recurrence, weights mu0 times the squared first
// eigenvector components.
QuadratureRule golub_welsch(const std::vector<double>& diag,
                            const std::vector<double>& off, double mu0) {
  int n = static_cast<int>(diag.size());
  std::vector<double> j(n * n, 0.0);
  for (int i = 0; i < n; ++i) j[i * n + i] = diag[i];
  for (int i = 0; i + 1 < n; ++i) j[i * n + i + 1] = j[(i + 1) * n + i] = off[i];
  SymmetricEigen e = symmetric_eigen(std::move(j), n);
  QuadratureRule rule;
  rule.nodes = e.eigenvalues;
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double q0 = e.eigenvectors[k];  // first row, column k
    rule.weights[k] = mu0 * q0 * q0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int k = 1; k < n; ++k)
    off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(diag, off, 2.0);
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k / 2.0);
  return golub_welsch(diag, off, std::sqrt(3.14159265358979323846));
}

QuadratureRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  std::vector<double> diag(n), off(n - 1);
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) off[k - 1] = static_cast<double>(k);
  return golub_welsch(diag, off, 1.0);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line needs at least two points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace avgschro
