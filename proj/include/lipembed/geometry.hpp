#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lipembed/errors.hpp"

namespace lipembed {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Finite sample of a set X in R^n with a declared intrinsic dimension k.
// Rows of the point matrix are sample points. Exactly coincident points are
// rejected at construction; every pairwise computation assumes distinctness.
class PointCloud {
 public:
  PointCloud(Matrix points, int intrinsic_dim, std::string label = "");

  int size() const { return static_cast<int>(points_.rows()); }
  int ambient_dim() const { return static_cast<int>(points_.cols()); }
  int intrinsic_dim() const { return intrinsic_dim_; }
  const Matrix& points() const { return points_; }
  Vector point(int i) const { return points_.row(i).transpose(); }
  const std::string& label() const { return label_; }

 private:
  Matrix points_;
  int intrinsic_dim_ = 0;
  std::string label_;
};

// Unit vector canonicalized so its first coordinate above the zero threshold
// is positive; models a point of real projective space.
class Direction {
 public:
  static constexpr double kZeroThreshold = 1e-12;

  // Normalizes and canonicalizes; throws on a (near-)zero vector.
  static Direction canonical(const Vector& raw);

  const Vector& vector() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }

 private:
  explicit Direction(Vector v) : v_(std::move(v)) {}
  Vector v_;
};

// Directions of secants of a cloud, one per unordered point pair, with
// near-duplicates collapsed (tolerance in chordal distance).
struct SecantSet {
  std::vector<Direction> directions;
  std::string source;
  int ambient_dim = 0;

  int size() const { return static_cast<int>(directions.size()); }
  // Rows are direction vectors; convenient for vectorized angle scans.
  Matrix matrix() const;
};

// A map f : X -> Y given on samples by an index bijection.
class SampledMap {
 public:
  SampledMap(PointCloud source, PointCloud target, std::vector<int> pairing);
  static SampledMap identity_pairing(PointCloud source, PointCloud target);

  const PointCloud& source() const { return source_; }
  const PointCloud& target() const { return target_; }
  const std::vector<int>& pairing() const { return pairing_; }
  int size() const { return source_.size(); }
  // Image of source point i under the pairing.
  Vector image(int i) const { return target_.point(pairing_[i]); }

 private:
  PointCloud source_;
  PointCloud target_;
  std::vector<int> pairing_;
};

// Two-sided Lipschitz bounds of a sampled map together with the attaining
// point pairs. lower == 0 with injective == false flags a collapsed pair.
struct DistortionReport {
  double lower = 0.0;
  double upper = 0.0;
  std::pair<int, int> witness_lower{-1, -1};
  std::pair<int, int> witness_upper{-1, -1};
  bool injective = true;
};

// sin of the angle between the lines spanned by p and s. Symmetric and
// invariant under negating either argument.
template <typename A, typename B>
double sin_angle(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& s) {
  if (p.size() != s.size())
    throw PreconditionError("sin_angle: dimension mismatch");
  const double pn = p.norm();
  const double sn = s.norm();
  if (pn < Direction::kZeroThreshold || sn < Direction::kZeroThreshold)
    throw PreconditionError("sin_angle: zero vector");
  double c = p.dot(s) / (pn * sn);
  c = std::clamp(c, -1.0, 1.0);
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

inline double sin_angle(const Direction& p, const Direction& s) {
  return sin_angle(p.vector(), s.vector());
}

// One canonical direction per unordered pair of distinct points, deduplicated
// at tolerance 1e-9. Throws on clouds with fewer than two points.
SecantSet secant_directions(const PointCloud& cloud);

// Exhaustive scan of |f(x)-f(y)| / |x-y| over all sample pairs. This scan is
// the distortion oracle the rest of the library is checked against.
DistortionReport distortion(const SampledMap& map);

}  // namespace lipembed
