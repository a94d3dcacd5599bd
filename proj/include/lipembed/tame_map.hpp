#pragma once

#include <variant>
#include <vector>

#include "lipembed/geometry.hpp"
#include "lipembed/mcshane.hpp"

namespace lipembed {

// Triangular shear: x[axis] += sign * offset(x restricted to `inputs`).
// The offset reads only the listed coordinates, none of which is the axis,
// so negating the sign inverts the factor exactly.
struct ShearFactor {
  int axis = 0;
  double sign = 1.0;            // +1 or -1
  std::vector<int> inputs;      // sorted coordinate indices, axis excluded
  SampledLipschitzFunction offset;
};

// Linear shear: x[row] += coeffs . x with coeffs[row] == 0. Elementary
// transvections are the single-nonzero case. Determinant is exactly 1.
struct LinearShearFactor {
  int row = 0;
  Vector coeffs;
};

// General linear factor with |det - 1| <= 1e-10; the inverse is cached.
class LinearFactor {
 public:
  static constexpr double kDetTolerance = 1e-10;

  explicit LinearFactor(Matrix m);

  const Matrix& matrix() const { return matrix_; }
  const Matrix& inverse_matrix() const { return inverse_; }

 private:
  Matrix matrix_;
  Matrix inverse_;
};

using TameFactor = std::variant<ShearFactor, LinearShearFactor, LinearFactor>;

// Ordered composition of shears and determinant-1 linear maps. Factors apply
// left to right; the inverse is the reversed list of factor inverses.
class TameMap {
 public:
  TameMap() = default;  // identity in dimension 0 until assigned
  TameMap(std::vector<TameFactor> factors, int dim);

  int dim() const { return dim_; }
  const std::vector<TameFactor>& factors() const { return factors_; }
  bool empty() const { return factors_.empty(); }

  Vector operator()(const Vector& x) const;
  Vector invert(const Vector& y) const;
  TameMap inverse() const;

  // True when every factor is a shear (sampled or linear), i.e. the map can
  // be scaled through an isotopy directly.
  bool isotopy_ready() const;
  // Replaces every general linear factor by its transvection decomposition.
  TameMap decomposed() const;

 private:
  std::vector<TameFactor> factors_;
  int dim_ = 0;
};

inline Vector eval(const TameMap& map, const Vector& x) { return map(x); }
inline Vector invert(const TameMap& map, const Vector& y) { return map.invert(y); }

// Concatenation: apply `first`, then `second`.
TameMap compose(const TameMap& first, const TameMap& second);

// Writes a determinant-1 matrix as a product of elementary transvections
// (row_i += c * row_j). Composing the returned factors in list order
// reconstructs the matrix; at most n(n+1) factors are produced.
std::vector<LinearShearFactor> sl_decompose(const Matrix& m);

// Lemma-style extension of a coordinate projection: when projecting `cloud`
// onto the listed coordinates is injective on samples, returns the tame map
// that shears every remaining coordinate to zero along the cloud.
TameMap projection_to_tame_subset(const PointCloud& cloud, const std::vector<int>& kept);

// Projection onto the first `split` coordinates.
TameMap projection_to_tame(const PointCloud& cloud, int split);

// Given f between a cloud inside R^s x {0} and one inside {0} x R^{n-s},
// builds the tame map F with F = f on samples: a block of shears installing
// the graph of f followed by the tame extension of the graph projection.
TameMap graph_transfer(const SampledMap& f, int source_subspace_dim);

// Evaluates the isotopy F_t obtained by scaling every shear offset by t.
// t = 0 returns the point unchanged, t = 1 matches eval bitwise. The map
// must be isotopy-ready (decompose general linear factors first).
Vector isotopy_eval(const TameMap& map, double t, const Vector& x);

}  // namespace lipembed
