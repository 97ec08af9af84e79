#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wald4/associated_form.hpp"
#include "wald4/euclidean.hpp"
#include "wald4/lambda.hpp"

namespace wald4 {

/// Negative type (i, j): counts of positive and negative lambda entries.
struct NegType {
  int pos = 0;
  int neg = 0;
  friend bool operator==(const NegType&, const NegType&) = default;
};

/// Sign pattern of a lambda array, entries in {+1, -1, 0}, normalized up
/// to global sign so the count of + is >= the count of - (ties broken so
/// the first nonzero sign is +).
struct SignPattern {
  std::array<int, 4> signs{0, 0, 0, 0};

  NegType type() const {
    int pos = 0, neg = 0;
    for (int s : signs) {
      if (s > 0) ++pos;
      if (s < 0) ++neg;
    }
    return {std::max(pos, neg), std::min(pos, neg)};
  }

  bool strict() const {
    for (int s : signs)
      if (s == 0) return false;
    return true;
  }

  friend bool operator==(const SignPattern&, const SignPattern&) = default;
};

inline SignPattern normalize(SignPattern p) {
  int pos = 0, neg = 0, first = 0;
  for (int s : p.signs) {
    if (s > 0) ++pos;
    if (s < 0) ++neg;
    if (first == 0) first = s;
  }
  const bool flip = neg > pos || (neg == pos && first < 0);
  if (flip)
    for (int& s : p.signs) s = -s;
  return p;
}

inline SignPattern classify_lambda(const LambdaArray& l) {
  if (l.values.size() != 4)
    throw std::invalid_argument("classify_lambda expects n = 4");
  const double ztol = 1e-12 * l.values.cwiseAbs().maxCoeff();
  SignPattern p;
  for (int i = 0; i < 4; ++i) {
    if (l.values[i] > ztol)
      p.signs[i] = 1;
    else if (l.values[i] < -ztol)
      p.signs[i] = -1;
  }
  return normalize(p);
}

/// The strict sign-pattern cones of a given type: the 4 patterns of type
/// (3,1) (one per choice of the negative index) and the 3 patterns of
/// type (2,2) (one per 2+2 split).
inline std::vector<SignPattern> enumerate_cones(NegType type) {
  std::vector<SignPattern> out;
  if (type == NegType{3, 1}) {
    for (int k = 0; k < 4; ++k) {
      SignPattern p{{1, 1, 1, 1}};
      p.signs[k] = -1;
      out.push_back(p);
    }
  } else if (type == NegType{2, 2}) {
    out.push_back(SignPattern{{1, 1, -1, -1}});
    out.push_back(SignPattern{{1, -1, 1, -1}});
    out.push_back(SignPattern{{1, -1, -1, 1}});
  } else {
    throw std::invalid_argument("enumerate_cones supports types (3,1), (2,2)");
  }
  return out;
}

struct ConeMinResult {
  double min_value = 0.0;   // min of rho over unit vectors of the closed cone
  LambdaArray argmin;       // lambda of the minimizing direction
  std::string face;         // "interior", "facet lambda_k = 0", "edge (k,l)"
  int face_dim = 3;
};

namespace detail {

inline constexpr double kConeMembershipTol = 1e-10;

// Is v (or -v) inside the closed cone of pattern p? Components within
// tolerance of zero count as boundary and are admitted.
inline bool cone_member(const Eigen::Vector4d& lambda, const SignPattern& p,
                        bool& flip) {
  const double tol = kConeMembershipTol * lambda.cwiseAbs().maxCoeff();
  for (int sgn : {1, -1}) {
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      const double v = sgn * lambda[i];
      if (p.signs[i] > 0 && v < -tol) ok = false;
      if (p.signs[i] < 0 && v > tol) ok = false;
    }
    if (ok) {
      flip = sgn < 0;
      return true;
    }
  }
  return false;
}

// Orthonormal basis of the plane orthogonal to u (3-space).
inline Eigen::Matrix<double, 3, 2> plane_basis(const Eigen::Vector3d& u) {
  const Eigen::Vector3d n = u.normalized();
  int k = 0;
  n.cwiseAbs().minCoeff(&k);
  Eigen::Vector3d a = Eigen::Vector3d::Unit(k);
  a = (a - a.dot(n) * n).normalized();
  const Eigen::Vector3d b = n.cross(a);
  Eigen::Matrix<double, 3, 2> q;
  q.col(0) = a;
  q.col(1) = b;
  return q;
}

} // namespace detail

/// Exact minimum of rho over unit vectors of the closed polyhedral cone
/// cut out by the sign pattern, via finite face enumeration: interior
/// candidates are eigenvectors of the form, facet candidates are
/// eigenvectors of the restriction to each plane lambda_k = 0, edge
/// candidates are the rays where two lambdas vanish.
inline ConeMinResult min_form_on_cone(const AssociatedForm& f,
                                      const SignPattern& p) {
  if (f.n != 4) throw std::invalid_argument("min_form_on_cone requires n = 4");
  if (!p.strict())
    throw std::invalid_argument("min_form_on_cone requires a strict pattern");
  const auto type = p.type();
  if (!(type == NegType{3, 1} || type == NegType{2, 2}))
    throw std::invalid_argument("pattern must have type (3,1) or (2,2)");

  const Eigen::Matrix3d m = f.m;
  const Eigen::Matrix<double, 3, 4> y = f.frame.y;

  struct Candidate {
    double value;
    Eigen::Vector3d v;
    std::string face;
    int dim;
  };
  std::vector<Candidate> admitted;

  const auto consider = [&](const Eigen::Vector3d& v, std::string face,
                            int dim) {
    const Eigen::Vector3d u = v.normalized();
    const Eigen::Vector4d lambda = 2.0 * y.transpose() * u;
    bool flip = false;
    if (!detail::cone_member(lambda, p, flip)) return;
    const Eigen::Vector3d w = flip ? Eigen::Vector3d(-u) : u;
    admitted.push_back({w.dot(m * w), w, std::move(face), dim});
  };

  // Interior: eigenvectors of the full form.
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    for (int k = 0; k < 3; ++k)
      consider(es.eigenvectors().col(k), "interior", 3);
  }
  // Facets lambda_k = 0: eigenvectors of the restriction to y_k-perp.
  for (int k = 0; k < 4; ++k) {
    const auto q = detail::plane_basis(y.col(k));
    const Eigen::Matrix2d a = q.transpose() * m * q;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    for (int e = 0; e < 2; ++e)
      consider(q * es.eigenvectors().col(e),
               "facet lambda_" + std::to_string(k + 1) + " = 0", 2);
  }
  // Edges lambda_k = lambda_l = 0.
  for (int k = 0; k < 4; ++k)
    for (int l = k + 1; l < 4; ++l) {
      const Eigen::Vector3d v = y.col(k).cross(y.col(l));
      consider(v, "edge (" + std::to_string(k + 1) + "," +
                      std::to_string(l + 1) + ")", 1);
    }

  if (admitted.empty())
    throw internal_inconsistency_error("cone has no admitted candidates");

  // Lowest value wins; near-ties go to the lowest-dimensional face.
  const Candidate* best = &admitted.front();
  for (const auto& c : admitted) {
    const double tie = 1e-12 * (1.0 + std::abs(best->value));
    if (c.value < best->value - tie ||
        (std::abs(c.value - best->value) <= tie && c.dim < best->dim))
      best = &c;
  }

  ConeMinResult res;
  res.min_value = best->value;
  res.argmin = vector_to_lambda(best->v, f.frame);
  res.face = best->face;
  res.face_dim = best->dim;
  return res;
}

struct NegTypeVerdict {
  bool holds = true;
  double worst_value = 0.0; // most negative cone minimum (relative to nothing)
  std::optional<LambdaArray> witness;
};

/// Do all negative-type inequalities of the given type hold for m?
/// Equivalent to the form being nonnegative on every cone of that type.
/// The witness (on failure) is the argmin lambda scaled so its most
/// negative entry is -1.
inline NegTypeVerdict all_negtype_hold(const FiniteSemimetric& m, NegType type,
                                       double tol = kPsdTol) {
  if (m.n != 4) throw std::invalid_argument("all_negtype_hold requires n = 4");
  const AssociatedForm f = form_from_metric(m);
  const double scale = spectral_radius(f.m);
  NegTypeVerdict verdict;
  verdict.worst_value = std::numeric_limits<double>::infinity();
  std::optional<ConeMinResult> worst;
  for (const auto& p : enumerate_cones(type)) {
    auto r = min_form_on_cone(f, p);
    if (r.min_value < verdict.worst_value) {
      verdict.worst_value = r.min_value;
      worst = std::move(r);
    }
  }
  verdict.holds = verdict.worst_value >= -tol * std::max(scale, 1e-300);
  if (!verdict.holds && worst) {
    Eigen::VectorXd lam = worst->argmin.values;
    const double mn = lam.minCoeff();
    if (mn < 0) lam /= -mn;
    verdict.witness = make_lambda(lam);
  }
  return verdict;
}

} // namespace wald4
