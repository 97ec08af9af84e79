#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "wald4/errors.hpp"
#include "wald4/lambda.hpp"
#include "wald4/semimetric.hpp"

namespace wald4 {

// ---------------------------------------------------------------------------
// Model points and distances
// ---------------------------------------------------------------------------

struct EuclideanPoint {
  Eigen::VectorXd x;
};

/// Point on the sphere of radius r, stored as a unit direction.
struct SpherePoint {
  double r = 1.0;
  Eigen::Vector3d u = Eigen::Vector3d::UnitX();
};

struct CirclePoint {
  double r = 1.0;
  double angle = 0.0;
};

/// Hyperboloid model of the hyperbolic plane (curvature -1):
/// x0^2 - x1^2 - x2^2 = 1, x0 >= 1.
struct HyperbolicPoint {
  Eigen::Vector3d x = Eigen::Vector3d::UnitX(); // (x0, x1, x2)
};

/// Point on one of the three half-lines glued at a common base point.
struct TripodPoint {
  int leg = 0;   // 0, 1, or 2
  double t = 0.0; // distance from the base point
};

struct ModelPoint;

struct ProductPoint {
  std::vector<ModelPoint> factors;
};

struct ModelPoint {
  std::variant<EuclideanPoint, SpherePoint, CirclePoint, HyperbolicPoint,
               TripodPoint, ProductPoint>
      v;
};

inline double minkowski(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2];
}

/// Stable arccosh for arguments >= 1 via 2*asinh(sqrt((q - 1)/2)).
inline double acosh_stable(double q) {
  if (q <= 1.0) return 0.0;
  return 2.0 * std::asinh(std::sqrt(0.5 * (q - 1.0)));
}

inline double model_distance(const ModelPoint& p, const ModelPoint& q);

namespace detail {

struct DistanceVisitor {
  double operator()(const EuclideanPoint& a, const EuclideanPoint& b) const {
    if (a.x.size() != b.x.size())
      throw std::invalid_argument("euclidean points of different dimension");
    return (a.x - b.x).norm();
  }
  double operator()(const SpherePoint& a, const SpherePoint& b) const {
    if (a.r != b.r) throw std::invalid_argument("sphere radii differ");
    const Eigen::Vector3d u = a.u.normalized(), v = b.u.normalized();
    return a.r * std::atan2(u.cross(v).norm(), u.dot(v));
  }
  double operator()(const CirclePoint& a, const CirclePoint& b) const {
    if (a.r != b.r) throw std::invalid_argument("circle radii differ");
    const double two_pi = 2.0 * M_PI;
    double delta = std::fmod(std::abs(a.angle - b.angle), two_pi);
    delta = std::min(delta, two_pi - delta);
    return a.r * delta;
  }
  double operator()(const HyperbolicPoint& a, const HyperbolicPoint& b) const {
    return acosh_stable(minkowski(a.x, b.x));
  }
  double operator()(const TripodPoint& a, const TripodPoint& b) const {
    return (a.leg == b.leg) ? std::abs(a.t - b.t) : a.t + b.t;
  }
  double operator()(const ProductPoint& a, const ProductPoint& b) const {
    if (a.factors.size() != b.factors.size())
      throw std::invalid_argument("product points of different shape");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.factors.size(); ++i) {
      const double d = model_distance(a.factors[i], b.factors[i]);
      sq += d * d;
    }
    return std::sqrt(sq);
  }
  template <class A, class B>
  double operator()(const A&, const B&) const {
    throw std::invalid_argument("model_distance: mismatched space tags");
  }
};

} // namespace detail

inline double model_distance(const ModelPoint& p, const ModelPoint& q) {
  return std::visit(detail::DistanceVisitor{}, p.v, q.v);
}

inline FiniteSemimetric metric_of(const std::array<ModelPoint, 4>& pts) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      d(i, j) = d(j, i) = model_distance(pts[i], pts[j]);
  return make_semimetric(d);
}

// ---------------------------------------------------------------------------
// Comparison quantities
// ---------------------------------------------------------------------------

/// Angle of the model triangle with sides (a, b, c) at the vertex between
/// b and c, for curvature 0 (Euclidean law of cosines) or -1 (hyperbolic
/// law of cosines).
inline double comparison_angle(double a, double b, double c, int curvature) {
  if (b <= 0.0 || c <= 0.0)
    throw std::domain_error("comparison_angle: zero adjacent side");
  const double tol = 1e-12 * std::max({a, b, c});
  if (a > b + c + tol || b > a + c + tol || c > a + b + tol)
    throw std::invalid_argument("comparison_angle: triangle inequality violated");
  double cosv;
  if (curvature == 0) {
    cosv = (b * b + c * c - a * a) / (2.0 * b * c);
  } else if (curvature == -1) {
    cosv = (std::cosh(b) * std::cosh(c) - std::cosh(a)) /
           (std::sinh(b) * std::sinh(c));
  } else {
    throw std::invalid_argument("comparison_angle: curvature must be 0 or -1");
  }
  return std::acos(std::clamp(cosv, -1.0, 1.0));
}

/// 16 * (squared area of the Euclidean model triangle), as a polynomial in
/// the squared side lengths. Negative output means no Euclidean triangle
/// with these sides exists.
inline double heron_16a2(double d12, double d23, double d31) {
  const double s12 = d12 * d12, s23 = d23 * d23, s31 = d31 * d31;
  const double sum = s12 + s23 + s31;
  return sum * sum - 2.0 * (s12 * s12 + s23 * s23 + s31 * s31);
}

inline double model_area(double d12, double d23, double d31) {
  return std::sqrt(std::max(0.0, heron_16a2(d12, d23, d31))) / 4.0;
}

// ---------------------------------------------------------------------------
// Point-on-side comparison
// ---------------------------------------------------------------------------

/// LHS - RHS of the point-on-side comparison
///   alpha d13^2 + (1-alpha) d23^2 - alpha (1-alpha) d12^2 <= d34^2,
/// for a quadruple whose x4 realizes the on-side constraint
///   alpha(1-alpha) d12^2 - alpha d14^2 - (1-alpha) d24^2 = 0.
/// Nonpositive value means the comparison holds at this alpha.
inline double point_on_side_value(const FiniteSemimetric& m, double alpha) {
  if (m.n != 4)
    throw std::invalid_argument("point_on_side_value requires n = 4");
  const double d12 = m.d(0, 1), d13 = m.d(0, 2), d23 = m.d(1, 2);
  const double d14 = m.d(0, 3), d24 = m.d(1, 3), d34 = m.d(2, 3);
  const double scale = std::max(max_distance(m) * max_distance(m), 1e-300);
  const double onside =
      alpha * (1.0 - alpha) * d12 * d12 - alpha * d14 * d14 -
      (1.0 - alpha) * d24 * d24;
  if (std::abs(onside) > 1e-9 * scale)
    throw not_on_side_error("x4 does not realize the on-side constraint");
  return alpha * d13 * d13 + (1.0 - alpha) * d23 * d23 -
         alpha * (1.0 - alpha) * d12 * d12 - d34 * d34;
}

// ---------------------------------------------------------------------------
// Telescoping identity
// ---------------------------------------------------------------------------

struct ComparisonConfig {
  double alpha = 0.5;
  double beta = 0.5;
  int k = 1;
  double gamma() const { return std::pow(beta, k); }
};

/// Distances feeding the telescoping identity: d(x1,x2), the distances
/// from x1 and x2 to the chain points x3..x_{3+k} (arbitrary), and the
/// first chain piece d(x3,x4); the remaining pieces follow the ratios
/// beta : beta^2 : ... : beta^k with additive partial sums.
struct TelescopeChain {
  double d12 = 1.0;
  std::vector<double> d1; // size k+1: distances x1 -> x_{3+i}, i = 0..k
  std::vector<double> d2; // size k+1: distances x2 -> x_{3+i}
  double first_piece = 1.0;
};

namespace detail {

// Left side of the negative-type inequality for lambda-array
// (a1, a2, a3, a4) on the six distances of a quadruple.
inline double lambda_lhs(double a1, double a2, double a3, double a4,
                         double d12, double d13, double d14, double d23,
                         double d24, double d34) {
  return 2.0 * (a1 * a2 * d12 * d12 + a1 * a3 * d13 * d13 +
                a1 * a4 * d14 * d14 + a2 * a3 * d23 * d23 +
                a2 * a4 * d24 * d24 + a3 * a4 * d34 * d34);
}

} // namespace detail

/// |L' - (1 - beta^k)/(1 - beta) * sum_i beta^{k-i} L_i| for the chained
/// quadruples; exactly zero in exact arithmetic whatever the distances to
/// x1 and x2 are, so the value measures floating-point error only.
inline double telescoping_residual(const ComparisonConfig& cfg,
                                   const TelescopeChain& chain) {
  const double alpha = cfg.alpha, beta = cfg.beta;
  const int k = cfg.k;
  if (k < 1) throw std::invalid_argument("telescoping_residual requires k >= 1");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("telescoping_residual requires 0 < beta < 1");
  if (chain.d1.size() != static_cast<std::size_t>(k + 1) ||
      chain.d2.size() != static_cast<std::size_t>(k + 1))
    throw std::invalid_argument("chain distance arrays must have size k + 1");
  if (chain.first_piece < 0.0)
    throw std::invalid_argument("chain pieces must be nonnegative");

  std::vector<double> piece(k + 1, 0.0); // piece[i] = d(x_{2+i}, x_{3+i})
  double chain_total = 0.0;
  for (int i = 1; i <= k; ++i) {
    piece[i] = chain.first_piece * std::pow(beta, i - 1);
    chain_total += piece[i];
  }

  const double l1 = alpha * (1.0 - beta), l2 = (1.0 - alpha) * (1.0 - beta);
  double weighted = 0.0;
  for (int i = 1; i <= k; ++i) {
    // Quadruple (x1, x2, x_{2+i}, x_{3+i}).
    const double li = detail::lambda_lhs(
        l1, l2, beta, -1.0, chain.d12, chain.d1[i - 1], chain.d1[i],
        chain.d2[i - 1], chain.d2[i], piece[i]);
    weighted += std::pow(beta, k - i) * li;
  }
  const double gamma = cfg.gamma();
  weighted *= (1.0 - gamma) / (1.0 - beta);

  const double lprime = detail::lambda_lhs(
      alpha * (1.0 - gamma), (1.0 - alpha) * (1.0 - gamma), gamma, -1.0,
      chain.d12, chain.d1[0], chain.d1[k], chain.d2[0], chain.d2[k],
      chain_total);
  return std::abs(lprime - weighted);
}

// ---------------------------------------------------------------------------
// Area bound and weighted (3,1) error
// ---------------------------------------------------------------------------

/// RHS - LHS of the area bound
///   sum lambda_i lambda_j d_ij^2 <= (12 + 3 delta^2) lambda1 lambda2
///   lambda3 * atilde^2
/// for hyperbolic quadruples and lambda = (l1, l2, l3, -1) with li > 0,
/// l1 + l2 + l3 = 1. Nonnegative value means the bound holds.
inline double lemma_area_bound_residual(const std::array<ModelPoint, 4>& pts,
                                        const LambdaArray& l) {
  if (l.values.size() != 4)
    throw std::invalid_argument("lemma residual requires a 4-entry lambda");
  const double l1 = l.values[0], l2 = l.values[1], l3 = l.values[2];
  if (!(l1 > 0.0 && l2 > 0.0 && l3 > 0.0) ||
      std::abs(l.values[3] + 1.0) > 1e-12 ||
      std::abs(l1 + l2 + l3 - 1.0) > 1e-12)
    throw std::invalid_argument(
        "lambda must be (l1, l2, l3, -1) with positive li summing to 1");
  for (const auto& p : pts)
    if (!std::holds_alternative<HyperbolicPoint>(p.v))
      throw std::invalid_argument("lemma residual requires hyperbolic points");

  const FiniteSemimetric m = metric_of(pts);
  const double lhs = negtype_value(m, l);
  const double d12 = m.d(0, 1), d23 = m.d(1, 2), d31 = m.d(0, 2);
  const double delta = std::max({d12, d23, d31});
  const double a2 = std::max(0.0, heron_16a2(d12, d23, d31)) / 16.0;
  const double rhs = (12.0 + 3.0 * delta * delta) * l1 * l2 * l3 * a2;
  return rhs - lhs;
}

/// LHS - RHS of the approximate (3,1) inequality with error term
///   10 delta^2 lambda1 lambda2 lambda3 (d12^2 + d23^2 + d31^2).
/// Diagnostic only; delta = 0 reduces to the plain (3,1) value.
inline double weighted_31_error_value(const FiniteSemimetric& m,
                                      const LambdaArray& l, double delta) {
  if (m.n != 4 || l.values.size() != 4)
    throw std::invalid_argument("weighted_31_error_value requires n = 4");
  const double l1 = l.values[0], l2 = l.values[1], l3 = l.values[2];
  if (!(l1 > 0.0 && l2 > 0.0 && l3 > 0.0))
    throw std::invalid_argument("lambda must have positive first three entries");
  const double lhs = negtype_value(m, l);
  const double s = m.d(0, 1) * m.d(0, 1) + m.d(1, 2) * m.d(1, 2) +
                   m.d(0, 2) * m.d(0, 2);
  return lhs - 10.0 * delta * delta * l1 * l2 * l3 * s;
}

// ---------------------------------------------------------------------------
// Geodesic helpers (used by the samplers and the point-on-side sweeps)
// ---------------------------------------------------------------------------

/// Point at arc distance s from a toward b on the sphere (minor arc).
inline SpherePoint sphere_walk(const SpherePoint& a, const SpherePoint& b,
                               double s) {
  const Eigen::Vector3d u = a.u.normalized(), v = b.u.normalized();
  const double ang = std::atan2(u.cross(v).norm(), u.dot(v));
  if (ang == 0.0) return a;
  const Eigen::Vector3d t = (v - std::cos(ang) * u).normalized();
  const double phi = s / a.r;
  return SpherePoint{a.r, std::cos(phi) * u + std::sin(phi) * t};
}

/// Point at signed distance s from a along the geodesic through b
/// (positive s toward b) in the hyperbolic plane.
inline HyperbolicPoint hyperbolic_walk(const HyperbolicPoint& a,
                                       const HyperbolicPoint& b, double s) {
  const double d = acosh_stable(minkowski(a.x, b.x));
  if (d == 0.0) return a;
  const Eigen::Vector3d u = (b.x - std::cosh(d) * a.x) / std::sinh(d);
  HyperbolicPoint p;
  p.x = std::cosh(s) * a.x + std::sinh(s) * u;
  // renormalize onto the hyperboloid against drift
  const double q = minkowski(p.x, p.x);
  if (q > 0.0) p.x /= std::sqrt(q);
  return p;
}

} // namespace wald4
