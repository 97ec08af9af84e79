#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace wald4 {

/// Vertices of the unit-edge regular simplex in R^{n-1}, centroid at the
/// origin. Column i of y is vertex y_i; the Gram matrix is
/// <y_i, y_j> = (n*delta_ij - 1) / (2n).
struct SimplexFrame {
  int n = 0;
  Eigen::MatrixXd y; // (n-1) x n
};

/// Deterministic frame built from the Helmert basis of the hyperplane
/// orthogonal to (1,...,1): y = H / sqrt(2), where H has orthonormal rows
/// summing to zero. Edges come out unit length because
/// y^T y = (I - J/n) / 2.
inline SimplexFrame simplex_frame(int n) {
  if (n < 2) throw std::invalid_argument("simplex_frame requires n >= 2");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n - 1, n);
  for (int k = 1; k < n; ++k) {
    const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int j = 0; j < k; ++j) h(k - 1, j) = s;
    h(k - 1, k) = -s * k;
  }
  SimplexFrame f;
  f.n = n;
  f.y = h / std::sqrt(2.0);
  return f;
}

/// Edge vector y_i - y_j of the frame.
inline Eigen::VectorXd edge_vector(const SimplexFrame& f, int i, int j) {
  return f.y.col(i) - f.y.col(j);
}

} // namespace wald4
