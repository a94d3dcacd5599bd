#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lipembed/rational.hpp"

namespace lipembed {

enum class BranchAxis { PlusX, MinusX, PlusY, MinusY };

std::string axis_name(BranchAxis axis);
BranchAxis axis_from_name(const std::string& name);

struct PuiseuxTerm {
  Rational exponent;
  double coefficient = 0.0;
};

// Half-branch of a plane curve germ: a finite Puiseux series f(t) = sum of
// c t^e with exact rational exponents >= 1, drawn over one coordinate
// half-axis. The empty series is the flat branch along the axis itself.
class PuiseuxBranch {
 public:
  PuiseuxBranch(std::vector<PuiseuxTerm> terms, BranchAxis axis);

  const std::vector<PuiseuxTerm>& terms() const { return terms_; }
  BranchAxis axis() const { return axis_; }
  bool is_zero() const { return terms_.empty(); }

  // Series value at parameter t >= 0.
  double eval(double t) const;
  // Point of the half-branch at parameter t >= 0.
  Eigen::Vector2d point(double t) const;
  // Slope of the series at 0: the coefficient of the exponent-1 term.
  double slope() const;
  // Unit tangent half-line direction at the origin.
  Eigen::Vector2d tangent() const;
  // Leading exponent; the branch must be nonzero.
  Rational order() const;
  double leading_coefficient() const;

  bool same_series(const PuiseuxBranch& other) const;
  // Termwise difference; both branches must share the axis.
  PuiseuxBranch minus(const PuiseuxBranch& other) const;
  // Parameter at which the branch meets the sphere of radius r (unique near
  // the origin); monotonicity is verified.
  double sphere_parameter(double r) const;

 private:
  std::vector<PuiseuxTerm> terms_;
  BranchAxis axis_ = BranchAxis::PlusX;
};

inline double eval_branch(const PuiseuxBranch& b, double t) { return b.eval(t); }

// Plane curve germ as a list of half-branches plus their grouping by tangent
// half-line. Branches sharing a tangent must share an axis encoding.
class GermCurve {
 public:
  explicit GermCurve(std::vector<PuiseuxBranch> branches, std::string label = "");

  const std::vector<PuiseuxBranch>& branches() const { return branches_; }
  const std::string& label() const { return label_; }
  int size() const { return static_cast<int>(branches_.size()); }
  // Tangent groups as lists of branch indices, sorted by tangent angle.
  const std::vector<std::vector<int>>& tangent_groups() const { return groups_; }

 private:
  std::vector<PuiseuxBranch> branches_;
  std::vector<std::vector<int>> groups_;
  std::string label_;
};

// Contact exponent of two distinct half-branches: the order of the series
// difference when the branches share a tangent encoding, exactly 1 when the
// tangent half-lines differ. Throws on identical branches.
Rational contact_exponent(const PuiseuxBranch& a, const PuiseuxBranch& b);

// Independent numeric oracle: least-squares slope of log dist(a on S_r,
// b on S_r) against log r over the given radii (decreasing).
double contact_exponent_numeric(const PuiseuxBranch& a, const PuiseuxBranch& b,
                                const std::vector<double>& radii);

// Backtracking search for a bijection matching all pairwise contact
// exponents; lexicographically first result, or nullopt when none exists.
std::optional<std::vector<int>> match_halfbranches(const GermCurve& x, const GermCurve& y);

// Contact matrix of a germ (diagonal entries are 0/1 placeholders, unused).
std::vector<std::vector<Rational>> contact_matrix(const GermCurve& g);

// Symbolic comparison near 0: true when a(t) < b(t) for small t > 0.
bool branch_below(const PuiseuxBranch& a, const PuiseuxBranch& b);

}  // namespace lipembed
