#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include "lipembed/puiseux.hpp"

namespace lipembed {

// Scalar function germ on [0, delta) used as graph data by the piecewise
// maps: a Puiseux series, a difference of germs, or a branch read through a
// linear cone chart.
class GermFn {
 public:
  virtual ~GermFn() = default;
  virtual double eval(double u) const = 0;
};
using GermFnPtr = std::shared_ptr<const GermFn>;

GermFnPtr make_zero_fn();
GermFnPtr make_puiseux_fn(PuiseuxBranch branch);
// a - b; collapses to an exact termwise difference when both are series.
GermFnPtr make_diff_fn(GermFnPtr a, GermFnPtr b);
// Graph of a branch in chart coordinates: v as a function of u where
// (u, v) = chart * p runs over the branch.
GermFnPtr make_chart_branch_fn(PuiseuxBranch branch, Eigen::Matrix2d chart);

// Invertible germ transformation of the plane.
class GermTransform {
 public:
  virtual ~GermTransform() = default;
  virtual Eigen::Vector2d fwd(const Eigen::Vector2d& p) const = 0;
  virtual Eigen::Vector2d bwd(const Eigen::Vector2d& p) const = 0;
};
using GermTransformPtr = std::shared_ptr<const GermTransform>;

// The quadrant normalization carrying graph(f) to graph(x^alpha): divides
// heights below the graph by h(x) = f(x)/x^alpha and shifts heights above it,
// identity outside the closed first quadrant.
GermTransformPtr make_straighten(GermFnPtr f, Rational alpha);
// (x, y) -> (x, y - x^alpha) on x >= 0, identity on x < 0.
GermTransformPtr make_monomial_shift(Rational alpha);
GermTransformPtr make_linear(const Eigen::Matrix2d& m);
GermTransformPtr make_seq(std::vector<GermTransformPtr> stages);
GermTransformPtr make_inverse(GermTransformPtr inner);

// Closed region predicate: the first quadrant or an angular sector.
struct Region {
  enum class Kind { quadrant, sector };
  Kind kind = Kind::quadrant;
  double theta1 = 0.0;  // sector only; span below pi/2
  double theta2 = 0.0;
  bool contains(const Eigen::Vector2d& p) const;
};

// Germ homeomorphism of the plane assembled from transforms glued along
// disjoint regions: exactly the identity outside every declared region.
class PiecewiseGermMap {
 public:
  struct Piece {
    Region region;
    GermTransformPtr map;
  };

  PiecewiseGermMap() = default;
  explicit PiecewiseGermMap(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {}

  const std::vector<Piece>& pieces() const { return pieces_; }
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
  Eigen::Vector2d apply_inverse(const Eigen::Vector2d& p) const;

 private:
  std::vector<Piece> pieces_;
};

// Straightens the graph of a nonnegative branch onto the graph of x^alpha.
PiecewiseGermMap straighten_graph(const PuiseuxBranch& f);

// Maps a stack of graphs over the first quadrant onto another stack with the
// same contact exponents: both lists must contain the flat zero branch.
// Throws NotEquivalentError on a contact mismatch.
PiecewiseGermMap stack_graphs(std::vector<PuiseuxBranch> x_branches,
                              std::vector<PuiseuxBranch> y_branches);

struct GermEquivalenceResult {
  PiecewiseGermMap map;
  std::vector<int> sigma;  // the contact-preserving half-branch matching
  // (r, Hausdorff(F(X on S_r), Y on S_r)) over the verification schedule.
  std::vector<std::pair<double, double>> sphere_hausdorff;
};

// Ambient equivalence of plane curve germs: matches half-branches, builds
// disjoint cones per tangent pair, and glues conjugated graph stacks.
// Throws NotEquivalentError when the contact invariants differ and
// SearchError when the cone construction cannot be realized.
GermEquivalenceResult ambient_curve_equivalence(const GermCurve& x, const GermCurve& y);

// Points of the germ on the sphere of radius r, one per half-branch.
std::vector<Eigen::Vector2d> sphere_points(const GermCurve& g, double r);

}  // namespace lipembed
