#pragma once

#include <Eigen/Dense>

#include "wald4/errors.hpp"
#include "wald4/semimetric.hpp"
#include "wald4/simplex_frame.hpp"

namespace wald4 {

/// The quadratic form rho of a point array, represented by a symmetric
/// matrix in the orthonormal coordinates of R^{n-1}, together with the
/// simplex frame it was built over. By construction
/// rho(y_i - y_j) = d_ij^2.
struct AssociatedForm {
  int n = 0;
  Eigen::MatrixXd m; // (n-1) x (n-1), symmetric
  SimplexFrame frame;
};

inline double evaluate(const AssociatedForm& f, const Eigen::VectorXd& v) {
  return v.dot(f.m * v);
}

inline double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Builds the unique quadratic form with rho(y_i - y_j) = d_ij^2.
/// The bilinear values on the basis {y_i - y_n} are
/// G(i,j) = (d_in^2 + d_jn^2 - d_ij^2) / 2; the matrix is then pushed
/// through the inverse of the edge basis.
inline AssociatedForm form_from_metric(const FiniteSemimetric& m) {
  const int n = m.n;
  AssociatedForm f;
  f.n = n;
  f.frame = simplex_frame(n);

  Eigen::MatrixXd g(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) {
      const double din = m.d(i, n - 1), djn = m.d(j, n - 1), dij = m.d(i, j);
      g(i, j) = 0.5 * (din * din + djn * djn - dij * dij);
    }

  // Columns of e are the edge vectors y_i - y_n.
  Eigen::MatrixXd e(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) e.col(i) = edge_vector(f.frame, i, n - 1);

  // M = e^{-T} g e^{-1}
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(e.transpose());
  Eigen::MatrixXd a = lu.solve(g);            // e^{-T} g
  Eigen::MatrixXd mm = lu.solve(a.transpose()); // e^{-T} (e^{-T} g)^T = e^{-T} g^T e^{-1}
  f.m = 0.5 * (mm + mm.transpose());
  return f;
}

/// Reads the distances back out of a form: d_ij = sqrt(rho(y_i - y_j)).
/// Edge values more negative than 1e-12 relative mean the form does not
/// come from a semimetric.
inline FiniteSemimetric metric_from_form(const AssociatedForm& f) {
  const int n = f.n;
  Eigen::MatrixXd vals(n, n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    vals(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = evaluate(f, edge_vector(f.frame, i, j));
      vals(i, j) = vals(j, i) = v;
      scale = std::max(scale, std::abs(v));
    }
  }
  const double tol = 1e-12 * std::max(scale, 1e-300);
  FiniteSemimetric m;
  m.n = n;
  m.d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (vals(i, j) < -tol) throw not_a_semimetric_error(i, j, vals(i, j));
      m.d(i, j) = m.d(j, i) = std::sqrt(std::max(0.0, vals(i, j)));
    }
  return m;
}

} // namespace wald4
