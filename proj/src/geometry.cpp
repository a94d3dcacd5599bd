#include "lipembed/geometry.hpp"

#include <limits>

namespace lipembed {

PointCloud::PointCloud(Matrix points, int intrinsic_dim, std::string label)
    : points_(std::move(points)), intrinsic_dim_(intrinsic_dim), label_(std::move(label)) {
  const int m = static_cast<int>(points_.rows());
  const int n = static_cast<int>(points_.cols());
  if (m < 1) throw PreconditionError("PointCloud: at least one point required");
  if (intrinsic_dim_ < 0 || intrinsic_dim_ > n)
    throw PreconditionError("PointCloud: intrinsic dimension out of range 0..n");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((points_.row(i) - points_.row(j)).norm() == 0.0)
        throw PreconditionError("PointCloud: coincident points " + std::to_string(i) +
                                " and " + std::to_string(j));
}

Direction Direction::canonical(const Vector& raw) {
  const double n = raw.norm();
  if (n < kZeroThreshold) throw PreconditionError("Direction: zero vector");
  Vector v = raw / n;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kZeroThreshold) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return Direction(std::move(v));
}

Matrix SecantSet::matrix() const {
  Matrix m(static_cast<int>(directions.size()), ambient_dim);
  for (int i = 0; i < static_cast<int>(directions.size()); ++i)
    m.row(i) = directions[i].vector().transpose();
  return m;
}

SampledMap::SampledMap(PointCloud source, PointCloud target, std::vector<int> pairing)
    : source_(std::move(source)), target_(std::move(target)), pairing_(std::move(pairing)) {
  if (source_.size() != target_.size())
    throw PreconditionError("SampledMap: source and target point counts differ");
  if (static_cast<int>(pairing_.size()) != source_.size())
    throw PreconditionError("SampledMap: pairing length mismatch");
  std::vector<char> seen(pairing_.size(), 0);
  for (int j : pairing_) {
    if (j < 0 || j >= source_.size() || seen[j])
      throw PreconditionError("SampledMap: pairing is not a bijection");
    seen[j] = 1;
  }
}

SampledMap SampledMap::identity_pairing(PointCloud source, PointCloud target) {
  std::vector<int> pairing(source.size());
  for (int i = 0; i < static_cast<int>(pairing.size()); ++i) pairing[i] = i;
  return SampledMap(std::move(source), std::move(target), std::move(pairing));
}

SecantSet secant_directions(const PointCloud& cloud) {
  if (cloud.size() < 2)
    throw PreconditionError("secant_directions: cloud has no point pairs");
  const Matrix& pts = cloud.points();
  std::vector<Vector> raw;
  raw.reserve(static_cast<std::size_t>(cloud.size()) * (cloud.size() - 1) / 2);
  for (int i = 0; i < cloud.size(); ++i)
    for (int j = i + 1; j < cloud.size(); ++j)
      raw.push_back(Direction::canonical(pts.row(i) - pts.row(j)).vector());

  // Lexicographic sort groups exact duplicates (collinear samples) adjacently;
  // the tolerance pass then collapses them.
  std::sort(raw.begin(), raw.end(), [](const Vector& a, const Vector& b) {
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  });

  SecantSet out;
  out.source = cloud.label();
  out.ambient_dim = cloud.ambient_dim();
  constexpr double kDedupTol = 1e-9;
  for (const Vector& v : raw) {
    if (!out.directions.empty() &&
        (out.directions.back().vector() - v).norm() <= kDedupTol)
      continue;
    out.directions.push_back(Direction::canonical(v));
  }
  return out;
}

DistortionReport distortion(const SampledMap& map) {
  if (map.size() < 2)
    throw PreconditionError("distortion: need at least two points");
  const Matrix& src = map.source().points();
  const Matrix& tgt = map.target().points();
  const std::vector<int>& p = map.pairing();

  DistortionReport rep;
  rep.lower = std::numeric_limits<double>::infinity();
  rep.upper = 0.0;
  for (int i = 0; i < map.size(); ++i) {
    for (int j = i + 1; j < map.size(); ++j) {
      const double ds = (src.row(i) - src.row(j)).norm();
      const double dt = (tgt.row(p[i]) - tgt.row(p[j])).norm();
      const double ratio = dt / ds;
      if (ratio < rep.lower) {
        rep.lower = ratio;
        rep.witness_lower = {i, j};
      }
      if (ratio > rep.upper) {
        rep.upper = ratio;
        rep.witness_upper = {i, j};
      }
      if (dt == 0.0) rep.injective = false;
    }
  }
  return rep;
}

}  // namespace lipembed
