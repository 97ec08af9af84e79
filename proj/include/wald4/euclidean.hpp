#pragma once

#include <Eigen/Dense>
#include <optional>

#include "wald4/associated_form.hpp"
#include "wald4/errors.hpp"
#include "wald4/lambda.hpp"

namespace wald4 {

inline constexpr double kPsdTol = 1e-9;

struct EuclideanCheck {
  bool euclidean = false;
  double min_eigenvalue = 0.0;
  double max_abs_eigenvalue = 0.0;
  // On failure: the most negative eigendirection as a lambda array.
  std::optional<LambdaArray> witness;
};

inline EuclideanCheck is_euclidean(const AssociatedForm& f,
                                   double tol = kPsdTol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.m);
  EuclideanCheck res;
  res.min_eigenvalue = es.eigenvalues().minCoeff();
  res.max_abs_eigenvalue = es.eigenvalues().cwiseAbs().maxCoeff();
  res.euclidean = res.min_eigenvalue >= -tol * res.max_abs_eigenvalue;
  if (!res.euclidean) {
    // eigenvalues are sorted ascending; column 0 is the most negative one
    res.witness = vector_to_lambda(es.eigenvectors().col(0), f.frame);
  }
  return res;
}

/// True iff the array embeds isometrically in a Euclidean space, i.e.
/// the associated form is positive semidefinite.
inline EuclideanCheck is_euclidean(const FiniteSemimetric& m,
                                   double tol = kPsdTol) {
  return is_euclidean(form_from_metric(m), tol);
}

/// Coordinates realizing the metric in dimension <= n-1 (one point per
/// column), obtained by the eigen square root of the PSD form applied to
/// the frame vertices. Rows with negligible eigenvalue are dropped.
inline Eigen::MatrixXd euclidean_embed(const FiniteSemimetric& m,
                                       double tol = kPsdTol) {
  const AssociatedForm f = form_from_metric(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.m);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() < -tol * top)
    throw not_euclidean_error("metric is not Euclidean (form not PSD)");
  // Descending eigenvalues, keep the significant ones.
  const int dim = f.n - 1;
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(dim, m.n);
  int rank = 0;
  for (int k = dim - 1; k >= 0; --k) {
    const double ev = es.eigenvalues()[k];
    if (ev <= tol * std::max(top, 1e-300)) break;
    coords.row(rank++) =
        std::sqrt(ev) * (es.eigenvectors().col(k).transpose() * f.frame.y);
  }
  return coords.topRows(std::max(rank, 1));
}

} // namespace wald4
