#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "wald4/associated_form.hpp"
#include "wald4/semimetric.hpp"
#include "wald4/simplex_frame.hpp"

namespace wald4 {

/// Coefficients (lambda_1, ..., lambda_n) with zero sum, defining one
/// negative-type inequality sum_{i,j} lambda_i lambda_j d_ij^2 <= 0.
/// type_pos/type_neg are the counts of strictly positive/negative
/// entries, swapped if needed so that type_pos >= type_neg.
struct LambdaArray {
  Eigen::VectorXd values;
  int type_pos = 0;
  int type_neg = 0;
};

inline LambdaArray make_lambda(const Eigen::VectorXd& values) {
  const double scale = values.cwiseAbs().maxCoeff();
  if (scale == 0.0)
    throw std::invalid_argument("lambda array must not be all zero");
  if (std::abs(values.sum()) > 1e-12 * scale)
    throw std::invalid_argument("lambda array must sum to zero");
  LambdaArray l;
  l.values = values;
  const double ztol = 1e-14 * scale;
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > ztol)
      ++pos;
    else if (values[i] < -ztol)
      ++neg;
  }
  l.type_pos = std::max(pos, neg);
  l.type_neg = std::min(pos, neg);
  return l;
}

/// v = sum_i lambda_i * y_i.
inline Eigen::VectorXd lambda_to_vector(const LambdaArray& l,
                                        const SimplexFrame& frame) {
  if (l.values.size() != frame.n)
    throw std::invalid_argument("lambda size does not match frame");
  return frame.y * l.values;
}

/// The unique zero-sum lambda with v = sum_i lambda_i * y_i. Since
/// y y^T = I/2 and the columns of y sum to zero, the inverse map is
/// simply lambda_i = 2 <y_i, v>.
inline LambdaArray vector_to_lambda(const Eigen::VectorXd& v,
                                    const SimplexFrame& frame) {
  if (v.size() != frame.n - 1)
    throw std::invalid_argument("vector size does not match frame");
  if (v.norm() == 0.0)
    throw std::invalid_argument("vector_to_lambda requires a nonzero vector");
  return make_lambda(2.0 * frame.y.transpose() * v);
}

/// The ordered double sum sum_{i,j} lambda_i lambda_j d_ij^2 over all
/// ordered pairs (every unordered pair counted twice). The inequality
/// "holds" when the value is <= 0.
inline double negtype_value(const FiniteSemimetric& m, const LambdaArray& l) {
  if (l.values.size() != m.n)
    throw std::invalid_argument("lambda size does not match metric");
  double sum = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = i + 1; j < m.n; ++j)
      sum += 2.0 * l.values[i] * l.values[j] * m.d(i, j) * m.d(i, j);
  return sum;
}

} // namespace wald4
