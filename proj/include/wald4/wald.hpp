#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wald4/associated_form.hpp"
#include "wald4/cones.hpp"
#include "wald4/errors.hpp"
#include "wald4/euclidean.hpp"
#include "wald4/semimetric.hpp"

namespace wald4 {

inline constexpr double kContactTol = 1e-8;  // relative to spectral radius
inline constexpr double kEqualityTol = 1e-7; // relative to max distance
inline constexpr double kEmbedTol = 1e-6;

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

struct Wald4Report {
  bool metric = false;    // all 12 triangle inequalities
  bool euclidean = false; // form PSD
  bool cbb = false;       // metric and all (3,1) inequalities
  bool cat = false;       // metric and all (2,2) inequalities
  TriangleCheck triangle;
  std::optional<LambdaArray> euclidean_witness;
  std::optional<LambdaArray> cbb_witness;
  std::optional<LambdaArray> cat_witness;
  double cbb_worst = 0.0; // worst (3,1) cone minimum
  double cat_worst = 0.0; // worst (2,2) cone minimum
};

inline Wald4Report classify4(const FiniteSemimetric& m, double tol = kPsdTol) {
  if (m.n != 4) throw std::invalid_argument("classify4 requires n = 4");
  Wald4Report rep;
  rep.triangle = check_triangle(m);
  rep.metric = rep.triangle.holds;
  const auto euc = is_euclidean(m, tol);
  rep.euclidean = euc.euclidean;
  rep.euclidean_witness = euc.witness;
  auto v31 = all_negtype_hold(m, NegType{3, 1}, tol);
  auto v22 = all_negtype_hold(m, NegType{2, 2}, tol);
  rep.cbb = rep.metric && v31.holds;
  rep.cat = rep.metric && v22.holds;
  rep.cbb_worst = v31.worst_value;
  rep.cat_worst = v22.worst_value;
  if (!v31.holds) rep.cbb_witness = std::move(v31.witness);
  if (!v22.holds) rep.cat_witness = std::move(v22.witness);
  return rep;
}

// ---------------------------------------------------------------------------
// Minimal form
// ---------------------------------------------------------------------------

/// Result of peeling rank-one squares off the associated form until the
/// zero directions of the four equator-plane restrictions span V_4.
struct MinimalFormResult {
  AssociatedForm rho_tilde;
  std::vector<std::pair<Eigen::Vector3d, double>> peeled; // (sigma, t)
  std::vector<Eigen::Vector3d> contacts; // unit equator directions with
                                         // rho_tilde = 0, up to sign
};

namespace detail {

inline std::vector<Eigen::Vector3d> equator_contacts(
    const Eigen::Matrix3d& m, const Eigen::Matrix<double, 3, 4>& y,
    double scale, double tol = kContactTol) {
  std::vector<Eigen::Vector3d> contacts;
  const double thresh = tol * std::max(scale, 1e-300);
  for (int k = 0; k < 4; ++k) {
    const auto q = plane_basis(y.col(k));
    const Eigen::Matrix2d a = q.transpose() * m * q;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    for (int e = 0; e < 2; ++e)
      if (std::abs(es.eigenvalues()[e]) <= thresh)
        contacts.push_back(q * es.eigenvectors().col(e));
  }
  return contacts;
}

// Orthonormal basis of the span of the given directions (columns).
inline Eigen::MatrixXd span_basis(const std::vector<Eigen::Vector3d>& dirs) {
  Eigen::MatrixXd basis(3, 0);
  for (const auto& d : dirs) {
    Eigen::Vector3d v = d;
    for (int c = 0; c < basis.cols(); ++c)
      v -= v.dot(basis.col(c)) * basis.col(c);
    if (v.norm() > 1e-8) {
      basis.conservativeResize(3, basis.cols() + 1);
      basis.col(basis.cols() - 1) = v.normalized();
    }
    if (basis.cols() == 3) break;
  }
  return basis;
}

// Largest t >= 0 such that a - t * s s^T stays PSD, for a PSD 2x2 a.
// Infinity when s has no weight on the range of a.
inline double psd_peel_bound(const Eigen::Matrix2d& a, const Eigen::Vector2d& s,
                             double scale) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
  const double thresh = kContactTol * std::max(scale, 1e-300);
  double denom = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double mu = es.eigenvalues()[i];
    const double si = s.dot(es.eigenvectors().col(i));
    if (mu > thresh) {
      denom += si * si / mu;
    } else if (std::abs(si) > 1e-7 * s.norm()) {
      return 0.0; // s leaves the range of a; no slack at all
    }
  }
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / denom;
}

} // namespace detail

/// Peels squares t * sigma^2 off rho, always in a direction orthogonal to
/// the current contact set and always by the largest amount that keeps
/// the four equator-plane restrictions PSD, until the contacts span V_4.
/// PSD input short-circuits with rho_tilde = rho.
inline MinimalFormResult minimal_form(const AssociatedForm& f,
                                      double psd_tol = kPsdTol) {
  if (f.n != 4) throw std::invalid_argument("minimal_form requires n = 4");
  {
    // Triangle precondition on the source metric.
    const FiniteSemimetric src = metric_from_form(f); // throws on bad edges
    if (!check_triangle(src).holds)
      throw std::invalid_argument(
          "minimal_form requires all triangle inequalities to hold");
  }

  const Eigen::Matrix<double, 3, 4> y = f.frame.y;
  const double scale0 = std::max(spectral_radius(f.m), 1e-300);

  MinimalFormResult res;
  res.rho_tilde = f;
  Eigen::Matrix3d m = f.m;

  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() >= -psd_tol * scale0) {
      res.contacts = detail::equator_contacts(m, y, scale0);
      return res; // already PSD, nothing to peel
    }
  }

  for (int iter = 0; iter < 8; ++iter) {
    res.contacts = detail::equator_contacts(m, y, scale0);
    const Eigen::MatrixXd span = detail::span_basis(res.contacts);
    if (span.cols() >= 3) {
      res.rho_tilde.m = m;
      return res;
    }
    // Complement of the contact span.
    Eigen::MatrixXd comp(3, 3 - span.cols());
    {
      Eigen::Matrix3d proj = Eigen::Matrix3d::Identity();
      if (span.cols() > 0) proj -= span * span.transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(proj);
      // eigenvalue ~1 eigenvectors span the complement (sorted ascending)
      for (int c = 0; c < comp.cols(); ++c)
        comp.col(c) = es.eigenvectors().col(2 - c);
    }
    // Most negative Rayleigh direction of rho_tilde within the complement.
    const Eigen::MatrixXd b = comp.transpose() * m * comp;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    const Eigen::Vector3d sigma =
        (comp * es.eigenvectors().col(0)).normalized();

    double t = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
      const auto q = detail::plane_basis(y.col(k));
      const Eigen::Vector2d s = q.transpose() * sigma;
      if (s.norm() <= 1e-12) continue; // sigma parallel to y_k, no bound
      const Eigen::Matrix2d a = q.transpose() * m * q;
      t = std::min(t, detail::psd_peel_bound(a, s, scale0));
    }
    if (!(t > 0.0) || !std::isfinite(t))
      throw internal_inconsistency_error("peeling stalled (t = " +
                                         std::to_string(t) + ")");
    m -= t * sigma * sigma.transpose();
    res.peeled.emplace_back(sigma, t);
  }
  throw internal_inconsistency_error("peeling did not converge");
}

// ---------------------------------------------------------------------------
// Equality patterns
// ---------------------------------------------------------------------------

enum class PatternKind { euclidean, tripod, circle };

struct EqualityPattern {
  PatternKind kind = PatternKind::euclidean;
  int hub = -1;                           // tripod: common middle point
  std::array<int, 2> antipodal{-1, -1};   // circle: antipodal pair
  std::array<int, 2> arcs{-1, -1};        // circle: points on opposite arcs
  std::vector<std::array<int, 3>> equalities; // (i, j, k): d_ik = d_ij + d_jk
};

namespace detail {

inline bool additive(const FiniteSemimetric& m, int i, int j, int k,
                     double tol) {
  return std::abs(m.d(i, k) - m.d(i, j) - m.d(j, k)) <= tol;
}

inline std::optional<int> find_tripod_hub(const FiniteSemimetric& m,
                                          double tol) {
  for (int h = 0; h < 4; ++h) {
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i)
      for (int j = i + 1; j < 4 && ok; ++j) {
        if (i == h || j == h) continue;
        if (!additive(m, i, h, j, tol)) ok = false;
      }
    if (ok) return h;
  }
  return std::nullopt;
}

struct CircleLabels {
  int a, b, p, q;
};

// Lexicographic search for an antipodal pair (a, b) with the other two
// points p, q sitting between them on opposite arcs. Among labelings
// within tolerance, the one with the largest antipodal distance wins.
inline std::optional<CircleLabels> find_circle_labels(
    const FiniteSemimetric& m, double tol) {
  std::optional<CircleLabels> best;
  double best_ab = -1.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      int others[2], c = 0;
      for (int i = 0; i < 4; ++i)
        if (i != a && i != b) others[c++] = i;
      const int p = others[0], q = others[1];
      if (additive(m, a, p, b, tol) && additive(m, a, q, b, tol) &&
          additive(m, p, b, q, tol) && m.d(a, b) > tol &&
          m.d(a, b) > best_ab) {
        best_ab = m.d(a, b);
        best = CircleLabels{a, b, p, q};
      }
    }
  return best;
}

} // namespace detail

/// Classifies the triangle-equality structure of a (reduced) metric:
/// euclidean when the form is PSD, tripod when three equalities share a
/// common middle point, circle when the quadrangle-case equalities hold
/// under some relabeling.
inline EqualityPattern equality_pattern(const FiniteSemimetric& m,
                                        double tol_rel = kEqualityTol) {
  if (m.n != 4) throw std::invalid_argument("equality_pattern requires n = 4");
  if (!check_triangle(m).holds)
    throw std::invalid_argument(
        "equality_pattern requires all triangle inequalities to hold");
  const double tol = tol_rel * std::max(max_distance(m), 1e-300);

  EqualityPattern pat;
  for (int i = 0; i < 4; ++i)
    for (int k = i + 1; k < 4; ++k)
      for (int j = 0; j < 4; ++j) {
        if (j == i || j == k) continue;
        if (detail::additive(m, i, j, k, tol)) pat.equalities.push_back({i, j, k});
      }

  if (is_euclidean(m).euclidean) {
    pat.kind = PatternKind::euclidean;
    return pat;
  }
  if (auto hub = detail::find_tripod_hub(m, tol)) {
    pat.kind = PatternKind::tripod;
    pat.hub = *hub;
    return pat;
  }
  if (auto labels = detail::find_circle_labels(m, tol)) {
    pat.kind = PatternKind::circle;
    pat.antipodal = {labels->a, labels->b};
    pat.arcs = {labels->p, labels->q};
    return pat;
  }
  throw internal_inconsistency_error(
      "non-PSD reduced form with no recognizable equality pattern");
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

struct CircleFactor {
  double r = 0.0;
  Eigen::Vector4d angles = Eigen::Vector4d::Zero(); // radians in [0, 2*pi)
};

struct TripodFactor {
  Eigen::Vector3d legs = Eigen::Vector3d::Zero();
  // Per point: (leg id, distance from the hub); the hub itself is (0, 0).
  std::array<std::pair<int, double>, 4> placement{};
};

/// Factor decomposition (circle | tripod | none) times Euclidean
/// coordinates; the product distance is the l2 combination of the two.
struct Embedding {
  std::variant<std::monostate, CircleFactor, TripodFactor> factor;
  Eigen::MatrixXd euclid; // rows = dimension (<= 3), cols = 4
};

inline double factor_distance(const Embedding& e, int i, int j) {
  if (std::holds_alternative<std::monostate>(e.factor)) return 0.0;
  if (const auto* c = std::get_if<CircleFactor>(&e.factor)) {
    const double two_pi = 2.0 * M_PI;
    double delta = std::fmod(std::abs(c->angles[i] - c->angles[j]), two_pi);
    delta = std::min(delta, two_pi - delta);
    return c->r * delta;
  }
  const auto& t = std::get<TripodFactor>(e.factor);
  const auto& [li, si] = t.placement[i];
  const auto& [lj, sj] = t.placement[j];
  return (li == lj) ? std::abs(si - sj) : si + sj;
}

inline double euclid_distance(const Embedding& e, int i, int j) {
  if (e.euclid.size() == 0) return 0.0;
  return (e.euclid.col(i) - e.euclid.col(j)).norm();
}

/// Maximum relative mismatch between the product distances of the
/// embedding and the input metric.
inline double verify_embedding(const FiniteSemimetric& m, const Embedding& e) {
  const double scale = std::max(max_distance(m), 1e-300);
  double worst = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = i + 1; j < m.n; ++j) {
      const double fd = factor_distance(e, i, j);
      const double ed = euclid_distance(e, i, j);
      const double rec = std::hypot(fd, ed);
      worst = std::max(worst, std::abs(rec - m.d(i, j)) / scale);
    }
  return worst;
}

namespace detail {

// Euclidean coordinates realizing the PSD difference rho - rho_tilde.
inline Eigen::MatrixXd euclidean_factor(const Eigen::Matrix3d& diff,
                                        const Eigen::Matrix<double, 3, 4>& y,
                                        double psd_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(diff);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(3, 4);
  int rank = 0;
  for (int k = 2; k >= 0; --k) {
    const double ev = es.eigenvalues()[k];
    if (ev <= psd_tol * std::max(top, 1e-300)) break;
    coords.row(rank++) = std::sqrt(ev) * (es.eigenvectors().col(k).transpose() * y);
  }
  return coords.topRows(std::max(rank, 1));
}

} // namespace detail

/// Constructs an isometric embedding of a cbb-feasible metric into
/// r*S^1 x R^3 (or plain R^3 when the form is PSD), following the
/// minimal-form reduction: the reduced metric goes onto the circle, the
/// peeled PSD remainder becomes the Euclidean factor.
inline Embedding embed_cbb(const FiniteSemimetric& m, double psd_tol = kPsdTol) {
  const auto rep = classify4(m, psd_tol);
  if (!rep.cbb)
    throw not_cbb_error("metric is not cbb-feasible (some (3,1) inequality fails)");

  const AssociatedForm f = form_from_metric(m);
  if (is_euclidean(f, psd_tol).euclidean)
    return Embedding{std::monostate{}, euclidean_embed(m, psd_tol)};

  const MinimalFormResult mf = minimal_form(f, psd_tol);
  const FiniteSemimetric dt = metric_from_form(mf.rho_tilde);
  const double tol = kEqualityTol * std::max(max_distance(dt), 1e-300);

  const auto labels = detail::find_circle_labels(dt, tol);
  if (!labels) {
    if (detail::find_tripod_hub(dt, tol))
      throw internal_inconsistency_error(
          "embed_cbb: reduced metric has a tripod pattern");
    throw internal_inconsistency_error(
        "embed_cbb: no circle pattern in the reduced metric");
  }
  const auto [a, b, p, q] = *labels;

  CircleFactor circle;
  circle.r = dt.d(a, b) / M_PI;
  circle.angles[a] = 0.0;
  circle.angles[b] = M_PI;
  circle.angles[p] = dt.d(a, p) / circle.r;
  circle.angles[q] = std::fmod(2.0 * M_PI - dt.d(a, q) / circle.r, 2.0 * M_PI);

  Embedding e;
  e.factor = circle;
  e.euclid = detail::euclidean_factor(f.m - mf.rho_tilde.m, f.frame.y, psd_tol);
  return e;
}

/// Constructs an isometric embedding of a cat-feasible metric into
/// Tripod x R^3, analogously to embed_cbb but with the tripod pattern.
inline Embedding embed_cat(const FiniteSemimetric& m, double psd_tol = kPsdTol) {
  const auto rep = classify4(m, psd_tol);
  if (!rep.cat)
    throw not_cat_error("metric is not cat-feasible (some (2,2) inequality fails)");

  const AssociatedForm f = form_from_metric(m);
  if (is_euclidean(f, psd_tol).euclidean)
    return Embedding{std::monostate{}, euclidean_embed(m, psd_tol)};

  const MinimalFormResult mf = minimal_form(f, psd_tol);
  const FiniteSemimetric dt = metric_from_form(mf.rho_tilde);
  const double tol = kEqualityTol * std::max(max_distance(dt), 1e-300);

  const auto hub = detail::find_tripod_hub(dt, tol);
  if (!hub) {
    if (detail::find_circle_labels(dt, tol))
      throw internal_inconsistency_error(
          "embed_cat: reduced metric has a circle pattern");
    throw internal_inconsistency_error(
        "embed_cat: no tripod pattern in the reduced metric");
  }

  TripodFactor tripod;
  int leg = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == *hub) {
      tripod.placement[i] = {0, 0.0};
      continue;
    }
    tripod.legs[leg] = dt.d(i, *hub);
    tripod.placement[i] = {leg, dt.d(i, *hub)};
    ++leg;
  }

  Embedding e;
  e.factor = tripod;
  e.euclid = detail::euclidean_factor(f.m - mf.rho_tilde.m, f.frame.y, psd_tol);
  return e;
}

} // namespace wald4
