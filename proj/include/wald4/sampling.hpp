#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wald4/models.hpp"
#include "wald4/rng.hpp"
#include "wald4/semimetric.hpp"

namespace wald4 {

/// Which model space to sample 4-point arrays from. A nonzero
/// product_dim wraps the base space in an l2-product with R^product_dim.
/// random_metric draws a symmetric matrix and repairs it into a metric by
/// shortest-path closure.
struct SpaceDescriptor {
  enum class Kind { euclidean, sphere, circle, hyperbolic, tripod, random_metric };
  Kind kind = Kind::random_metric;
  double r = 1.0;    // sphere / circle radius
  double cap = 1.0;  // hyperbolic diameter cap, tripod leg cap, random scale
  int dim = 3;       // euclidean dimension
  int product_dim = 0;
};

namespace detail {

inline ModelPoint sample_base_point(const SpaceDescriptor& s, SplitMix64& rng) {
  switch (s.kind) {
    case SpaceDescriptor::Kind::euclidean: {
      Eigen::VectorXd x(s.dim);
      for (int i = 0; i < s.dim; ++i) x[i] = rng.gaussian();
      return ModelPoint{EuclideanPoint{std::move(x)}};
    }
    case SpaceDescriptor::Kind::sphere: {
      Eigen::Vector3d u;
      do {
        u = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
      } while (u.norm() < 1e-12);
      return ModelPoint{SpherePoint{s.r, u.normalized()}};
    }
    case SpaceDescriptor::Kind::circle:
      return ModelPoint{CirclePoint{s.r, rng.uniform(0.0, 2.0 * M_PI)}};
    case SpaceDescriptor::Kind::hyperbolic: {
      const double theta = rng.uniform(0.0, 2.0 * M_PI);
      const double d = rng.uniform(0.0, 0.5 * s.cap);
      HyperbolicPoint p;
      p.x = Eigen::Vector3d(std::cosh(d), std::sinh(d) * std::cos(theta),
                            std::sinh(d) * std::sin(theta));
      return ModelPoint{p};
    }
    case SpaceDescriptor::Kind::tripod:
      return ModelPoint{TripodPoint{rng.uniform_int(3), rng.uniform(0.0, s.cap)}};
    default:
      throw std::invalid_argument("sample_base_point: not a point space");
  }
}

} // namespace detail

/// One 4-point array of model points (not available for random_metric).
inline std::array<ModelPoint, 4> sample_points(const SpaceDescriptor& s,
                                               SplitMix64& rng) {
  std::array<ModelPoint, 4> pts;
  for (auto& p : pts) {
    ModelPoint base = detail::sample_base_point(s, rng);
    if (s.product_dim > 0) {
      Eigen::VectorXd x(s.product_dim);
      for (int i = 0; i < s.product_dim; ++i) x[i] = rng.gaussian();
      ProductPoint prod;
      prod.factors.push_back(std::move(base));
      prod.factors.push_back(ModelPoint{EuclideanPoint{std::move(x)}});
      p = ModelPoint{std::move(prod)};
    } else {
      p = std::move(base);
    }
  }
  return pts;
}

/// Symmetric nonnegative matrix repaired into a metric by shortest-path
/// (Floyd-Warshall) closure; the result always satisfies all triangle
/// inequalities.
inline FiniteSemimetric sample_random_metric(SplitMix64& rng, double cap) {
  Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) d(i, j) = d(j, i) = rng.uniform(0.0, cap);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  d.diagonal().setZero();
  return make_semimetric(d);
}

/// Deterministic batch sampler: same (descriptor, count, seed) always
/// yields the same list. Trial i uses the sub-seed sub_seed(seed, i).
inline std::vector<FiniteSemimetric> sample(const SpaceDescriptor& s, int count,
                                            std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample requires count >= 1");
  std::vector<FiniteSemimetric> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    SplitMix64 rng(sub_seed(seed, static_cast<std::uint64_t>(i)));
    if (s.kind == SpaceDescriptor::Kind::random_metric)
      out.push_back(sample_random_metric(rng, s.cap));
    else
      out.push_back(metric_of(sample_points(s, rng)));
  }
  return out;
}

/// Parses descriptors like "circle:r=2", "sphere:r=1,xdim=3",
/// "euclidean:dim=2", "hyperbolic:cap=1", "tripod:cap=2,xdim=3", "random".
inline SpaceDescriptor parse_descriptor(const std::string& text) {
  SpaceDescriptor s;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (name == "euclidean")
    s.kind = SpaceDescriptor::Kind::euclidean;
  else if (name == "sphere")
    s.kind = SpaceDescriptor::Kind::sphere;
  else if (name == "circle")
    s.kind = SpaceDescriptor::Kind::circle;
  else if (name == "hyperbolic")
    s.kind = SpaceDescriptor::Kind::hyperbolic;
  else if (name == "tripod")
    s.kind = SpaceDescriptor::Kind::tripod;
  else if (name == "random")
    s.kind = SpaceDescriptor::Kind::random_metric;
  else
    throw std::invalid_argument("unknown space descriptor: " + name);
  if (colon == std::string::npos) return s;

  std::string rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item = rest.substr(0, comma);
    rest = (comma == std::string::npos) ? "" : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad descriptor parameter: " + item);
    const std::string key = item.substr(0, eq);
    const double val = std::stod(item.substr(eq + 1));
    if (key == "r")
      s.r = val;
    else if (key == "cap")
      s.cap = val;
    else if (key == "dim")
      s.dim = static_cast<int>(val);
    else if (key == "xdim")
      s.product_dim = static_cast<int>(val);
    else
      throw std::invalid_argument("unknown descriptor parameter: " + key);
  }
  return s;
}

} // namespace wald4
