#pragma once

#include <vector>

namespace avgschro {

/// Dense symmetric matrix in row-major storage, n x n.
struct SymmetricEigen {
  std::vector<double> eigenvalues;    // ascending
  std::vector<double> eigenvectors;   // column k at [i*n + k]
};

/// Cyclic Jacobi rotations; adequate for the small Gram and quadrature
/// matrices used here (n up to a few hundred).
SymmetricEigen symmetric_eigen(std::vector<double> a, int n);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre on [-1, 1].
QuadratureRule gauss_legendre(int n);
/// Gauss-Hermite with weight exp(-x^2) on R.
QuadratureRule gauss_hermite(int n);
/// Gauss-Laguerre with weight exp(-x) on [0, inf).
QuadratureRule gauss_laguerre(int n);

/// Least-squares fit y = a + b x; returns {a, b}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace avgschro
