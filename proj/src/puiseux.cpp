#include "lipembed/puiseux.hpp"

#include <algorithm>
#include <cmath>

namespace lipembed {

std::string axis_name(BranchAxis axis) {
  switch (axis) {
    case BranchAxis::PlusX: return "+x";
    case BranchAxis::MinusX: return "-x";
    case BranchAxis::PlusY: return "+y";
    case BranchAxis::MinusY: return "-y";
  }
  throw Error("axis_name: bad axis");
}

BranchAxis axis_from_name(const std::string& name) {
  if (name == "+x") return BranchAxis::PlusX;
  if (name == "-x") return BranchAxis::MinusX;
  if (name == "+y") return BranchAxis::PlusY;
  if (name == "-y") return BranchAxis::MinusY;
  throw ParseError("axis_from_name: unknown axis '" + name + "'");
}

PuiseuxBranch::PuiseuxBranch(std::vector<PuiseuxTerm> terms, BranchAxis axis)
    : terms_(std::move(terms)), axis_(axis) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].coefficient == 0.0)
      throw PreconditionError("PuiseuxBranch: zero coefficient");
    if (terms_[i].exponent < Rational(1))
      throw PreconditionError("PuiseuxBranch: exponent below 1");
    if (i > 0 && !(terms_[i - 1].exponent < terms_[i].exponent))
      throw PreconditionError("PuiseuxBranch: exponents must strictly increase");
  }
}

double PuiseuxBranch::eval(double t) const {
  if (t < 0.0) throw PreconditionError("PuiseuxBranch: negative parameter");
  double sum = 0.0;
  for (const PuiseuxTerm& term : terms_)
    sum += term.coefficient * std::pow(t, term.exponent.to_double());
  return sum;
}

Eigen::Vector2d PuiseuxBranch::point(double t) const {
  const double v = eval(t);
  switch (axis_) {
    case BranchAxis::PlusX: return {t, v};
    case BranchAxis::MinusX: return {-t, v};
    case BranchAxis::PlusY: return {v, t};
    case BranchAxis::MinusY: return {v, -t};
  }
  throw Error("PuiseuxBranch: bad axis");
}

double PuiseuxBranch::slope() const {
  for (const PuiseuxTerm& term : terms_)
    if (term.exponent == Rational(1)) return term.coefficient;
  return 0.0;
}

Eigen::Vector2d PuiseuxBranch::tangent() const {
  const double s = slope();
  Eigen::Vector2d t;
  switch (axis_) {
    case BranchAxis::PlusX: t = {1.0, s}; break;
    case BranchAxis::MinusX: t = {-1.0, s}; break;
    case BranchAxis::PlusY: t = {s, 1.0}; break;
    case BranchAxis::MinusY: t = {s, -1.0}; break;
  }
  return t.normalized();
}

Rational PuiseuxBranch::order() const {
  if (terms_.empty()) throw PreconditionError("PuiseuxBranch: zero branch has no order");
  return terms_.front().exponent;
}

double PuiseuxBranch::leading_coefficient() const {
  if (terms_.empty()) throw PreconditionError("PuiseuxBranch: zero branch");
  return terms_.front().coefficient;
}

bool PuiseuxBranch::same_series(const PuiseuxBranch& other) const {
  if (axis_ != other.axis_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].exponent != other.terms_[i].exponent ||
        terms_[i].coefficient != other.terms_[i].coefficient)
      return false;
  return true;
}

PuiseuxBranch PuiseuxBranch::minus(const PuiseuxBranch& other) const {
  if (axis_ != other.axis_)
    throw PreconditionError("PuiseuxBranch: difference across axes");
  std::vector<PuiseuxTerm> merged;
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < other.terms_.size()) {
    if (j == other.terms_.size() ||
        (i < terms_.size() && terms_[i].exponent < other.terms_[j].exponent)) {
      merged.push_back(terms_[i++]);
    } else if (i == terms_.size() || other.terms_[j].exponent < terms_[i].exponent) {
      merged.push_back({other.terms_[j].exponent, -other.terms_[j].coefficient});
      ++j;
    } else {
      const double c = terms_[i].coefficient - other.terms_[j].coefficient;
      if (c != 0.0) merged.push_back({terms_[i].exponent, c});
      ++i;
      ++j;
    }
  }
  return PuiseuxBranch(std::move(merged), axis_);
}

double PuiseuxBranch::sphere_parameter(double r) const {
  if (r <= 0.0) throw PreconditionError("sphere_parameter: radius must be positive");
  // |point(t)| >= t, so [0, r] brackets the crossing; check the norm stays
  // monotone so the crossing is unique.
  const int kProbes = 64;
  double prev = 0.0;
  for (int i = 1; i <= kProbes; ++i) {
    const double norm = point(r * i / kProbes).norm();
    if (norm < prev - 1e-15)
      throw PreconditionError("sphere_parameter: branch norm not monotone below r");
    prev = norm;
  }
  if (prev < r)
    throw PreconditionError("sphere_parameter: branch does not reach the sphere");
  double lo = 0.0, hi = r;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (point(mid).norm() < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GermCurve::GermCurve(std::vector<PuiseuxBranch> branches, std::string label)
    : branches_(std::move(branches)), label_(std::move(label)) {
  if (branches_.empty()) throw PreconditionError("GermCurve: at least one branch required");
  for (std::size_t i = 0; i < branches_.size(); ++i)
    for (std::size_t j = i + 1; j < branches_.size(); ++j) {
      if (branches_[i].same_series(branches_[j]))
        throw PreconditionError("GermCurve: duplicate branches " + std::to_string(i) +
                                " and " + std::to_string(j));
      // A shared tangent must be encoded over a shared axis, otherwise the
      // symbolic contact below is undefined.
      if (branches_[i].axis() != branches_[j].axis() &&
          (branches_[i].tangent() - branches_[j].tangent()).norm() < 1e-12)
        throw PreconditionError(
            "GermCurve: branches share a tangent across different axis encodings");
    }

  std::vector<int> order(branches_.size());
  for (std::size_t i = 0; i < branches_.size(); ++i) order[i] = static_cast<int>(i);
  auto angle = [&](int i) {
    const Eigen::Vector2d t = branches_[i].tangent();
    return std::atan2(t.y(), t.x());
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return angle(a) < angle(b); });
  for (int idx : order) {
    if (!groups_.empty()) {
      const int rep = groups_.back().front();
      if ((branches_[idx].tangent() - branches_[rep].tangent()).norm() < 1e-12) {
        groups_.back().push_back(idx);
        continue;
      }
    }
    groups_.push_back({idx});
  }
}

Rational contact_exponent(const PuiseuxBranch& a, const PuiseuxBranch& b) {
  if (a.same_series(b))
    throw PreconditionError("contact_exponent: contact of a branch with itself");
  if (a.axis() == b.axis()) return a.minus(b).order();
  if ((a.tangent() - b.tangent()).norm() < 1e-12)
    throw PreconditionError(
        "contact_exponent: shared tangent across axis encodings is unsupported");
  return Rational(1);
}

double contact_exponent_numeric(const PuiseuxBranch& a, const PuiseuxBranch& b,
                                const std::vector<double>& radii) {
  if (radii.size() < 2)
    throw PreconditionError("contact_exponent_numeric: need at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1]))
      throw PreconditionError("contact_exponent_numeric: radii must decrease");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double r : radii) {
    const Eigen::Vector2d pa = a.point(a.sphere_parameter(r));
    const Eigen::Vector2d pb = b.point(b.sphere_parameter(r));
    const double d = (pa - pb).norm();
    if (d == 0.0)
      throw PreconditionError("contact_exponent_numeric: branches meet on a sphere");
    const double lx = std::log(r), ly = std::log(d);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(radii.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<std::vector<Rational>> contact_matrix(const GermCurve& g) {
  const int m = g.size();
  std::vector<std::vector<Rational>> c(m, std::vector<Rational>(m, Rational(0)));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      c[i][j] = contact_exponent(g.branches()[i], g.branches()[j]);
      c[j][i] = c[i][j];
    }
  return c;
}

namespace {

bool extend_matching(const std::vector<std::vector<Rational>>& cx,
                     const std::vector<std::vector<Rational>>& cy,
                     std::vector<int>& sigma, std::vector<char>& used, int i) {
  const int m = static_cast<int>(cx.size());
  if (i == m) return true;
  for (int j = 0; j < m; ++j) {
    if (used[j]) continue;
    bool ok = true;
    for (int prev = 0; prev < i && ok; ++prev)
      if (cx[i][prev] != cy[j][sigma[prev]]) ok = false;
    if (!ok) continue;
    sigma[i] = j;
    used[j] = 1;
    if (extend_matching(cx, cy, sigma, used, i + 1)) return true;
    used[j] = 0;
  }
  return false;
}

}  // namespace

std::optional<std::vector<int>> match_halfbranches(const GermCurve& x, const GermCurve& y) {
  if (x.size() != y.size()) return std::nullopt;
  const auto cx = contact_matrix(x);
  const auto cy = contact_matrix(y);
  std::vector<int> sigma(x.size(), -1);
  std::vector<char> used(x.size(), 0);
  if (extend_matching(cx, cy, sigma, used, 0)) return sigma;
  return std::nullopt;
}

bool branch_below(const PuiseuxBranch& a, const PuiseuxBranch& b) {
  if (a.same_series(b)) return false;
  const PuiseuxBranch diff = b.minus(a);
  return diff.leading_coefficient() > 0.0;
}

}  // namespace lipembed
