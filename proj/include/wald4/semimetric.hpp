#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace wald4 {

/// A finite semimetric: symmetric nonnegative distance matrix with zero
/// diagonal. Triangle inequalities are not required by the type; use
/// satisfies_triangle to check them.
struct FiniteSemimetric {
  int n = 0;
  Eigen::MatrixXd d;
};

inline double max_distance(const FiniteSemimetric& m) {
  return m.d.maxCoeff();
}

/// Validates and builds a semimetric from a square distance matrix.
/// Small asymmetries (up to 1e-12 relative) are symmetrized away;
/// anything worse is rejected.
inline FiniteSemimetric make_semimetric(const Eigen::MatrixXd& d) {
  const auto n = d.rows();
  if (n < 2 || d.cols() != n)
    throw std::invalid_argument("semimetric needs a square matrix with n >= 2");
  const double scale = d.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(scale, 1e-300);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(d(i, i)) > tol)
      throw std::invalid_argument("semimetric diagonal must be zero (row " +
                                  std::to_string(i + 1) + ")");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(d(i, j) - d(j, i)) > tol)
        throw std::invalid_argument("semimetric matrix is not symmetric at (" +
                                    std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ")");
      if (d(i, j) < -tol)
        throw std::invalid_argument("semimetric entries must be nonnegative");
    }
  }
  FiniteSemimetric m;
  m.n = static_cast<int>(n);
  m.d = 0.5 * (d + d.transpose());
  m.d.diagonal().setZero();
  m.d = m.d.cwiseMax(0.0);
  return m;
}

struct TriangleCheck {
  bool holds = true;
  // Worst ordered triple (i, j, k): checks d(i,k) <= d(i,j) + d(j,k).
  int i = -1, j = -1, k = -1;
  double violation = 0.0; // d(i,k) - d(i,j) - d(j,k), largest over triples
};

/// Checks all triangle inequalities d_ik <= d_ij + d_jk (12 of them for
/// n = 4) up to 1e-12 relative slack; reports the worst triple.
inline TriangleCheck check_triangle(const FiniteSemimetric& m) {
  TriangleCheck res;
  const double tol = 1e-12 * std::max(max_distance(m), 1e-300);
  res.violation = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      for (int k = 0; k < m.n; ++k) {
        if (i == j || j == k || i == k) continue;
        const double v = m.d(i, k) - m.d(i, j) - m.d(j, k);
        if (v > res.violation) {
          res.violation = v;
          res.i = i;
          res.j = j;
          res.k = k;
        }
      }
  res.holds = res.violation <= tol;
  return res;
}

} // namespace wald4
