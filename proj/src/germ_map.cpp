#include "lipembed/germ_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lipembed/germ_nodes.hpp"

namespace lipembed {

namespace {

double pow_rational(double x, const Rational& e) { return std::pow(x, e.to_double()); }

double wrap_angle(double a) {
  while (a <= -M_PI) a += 2.0 * M_PI;
  while (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

}  // namespace

double ChartBranchFn::eval(double u) const {
  if (u < 0.0) throw PreconditionError("ChartBranchFn: negative chart abscissa");
  if (u == 0.0) return 0.0;
  auto chart_x = [&](double t) { return (chart_ * branch_.point(t)).x(); };
  // The abscissa grows like a positive multiple of the parameter near 0.
  double hi = u;
  int guard = 0;
  while (chart_x(hi) < u) {
    hi *= 2.0;
    if (++guard > 200)
      throw Error("ChartBranchFn: failed to bracket the chart abscissa");
  }
  double lo = 0.0;
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    (chart_x(mid) < u ? lo : hi) = mid;
  }
  return (chart_ * branch_.point(0.5 * (lo + hi))).y();
}

Eigen::Vector2d StraightenTx::fwd(const Eigen::Vector2d& p) const {
  const double x = p.x(), y = p.y();
  if (x <= 0.0 || y < 0.0) return p;
  const double fx = std::max(f_->eval(x), 0.0);
  const double xa = pow_rational(x, alpha_);
  if (y <= fx) {
    if (fx == 0.0) return p;
    return {x, y * xa / fx};
  }
  return {x, y + xa - fx};
}

Eigen::Vector2d StraightenTx::bwd(const Eigen::Vector2d& p) const {
  const double x = p.x(), y = p.y();
  if (x <= 0.0 || y < 0.0) return p;
  const double fx = std::max(f_->eval(x), 0.0);
  const double xa = pow_rational(x, alpha_);
  if (y <= xa) {
    if (xa == 0.0) return p;
    return {x, y * fx / xa};
  }
  return {x, y - xa + fx};
}

Eigen::Vector2d MonomialShiftTx::fwd(const Eigen::Vector2d& p) const {
  if (p.x() < 0.0) return p;
  return {p.x(), p.y() - pow_rational(p.x(), alpha_)};
}

Eigen::Vector2d MonomialShiftTx::bwd(const Eigen::Vector2d& p) const {
  if (p.x() < 0.0) return p;
  return {p.x(), p.y() + pow_rational(p.x(), alpha_)};
}

LinearTx::LinearTx(const Eigen::Matrix2d& m) : m_(m) {
  const double det = m.determinant();
  if (std::abs(det) < 1e-12) throw PreconditionError("LinearTx: singular matrix");
  inv_ << m(1, 1) / det, -m(0, 1) / det, -m(1, 0) / det, m(0, 0) / det;
}

GermFnPtr make_zero_fn() { return std::make_shared<ZeroFn>(); }

GermFnPtr make_puiseux_fn(PuiseuxBranch branch) {
  return std::make_shared<PuiseuxFn>(std::move(branch));
}

GermFnPtr make_diff_fn(GermFnPtr a, GermFnPtr b) {
  const auto* pa = dynamic_cast<const PuiseuxFn*>(a.get());
  const auto* pb = dynamic_cast<const PuiseuxFn*>(b.get());
  if (pa && pb && pa->branch().axis() == pb->branch().axis())
    return std::make_shared<PuiseuxFn>(pa->branch().minus(pb->branch()));
  return std::make_shared<DiffFn>(std::move(a), std::move(b));
}

GermFnPtr make_chart_branch_fn(PuiseuxBranch branch, Eigen::Matrix2d chart) {
  return std::make_shared<ChartBranchFn>(std::move(branch), std::move(chart));
}

GermTransformPtr make_straighten(GermFnPtr f, Rational alpha) {
  return std::make_shared<StraightenTx>(std::move(f), alpha);
}

GermTransformPtr make_monomial_shift(Rational alpha) {
  return std::make_shared<MonomialShiftTx>(alpha);
}

GermTransformPtr make_linear(const Eigen::Matrix2d& m) {
  return std::make_shared<LinearTx>(m);
}

GermTransformPtr make_seq(std::vector<GermTransformPtr> stages) {
  return std::make_shared<SeqTx>(std::move(stages));
}

GermTransformPtr make_inverse(GermTransformPtr inner) {
  return std::make_shared<InverseTx>(std::move(inner));
}

bool Region::contains(const Eigen::Vector2d& p) const {
  if (kind == Kind::quadrant) return p.x() >= 0.0 && p.y() >= 0.0;
  if (p.x() == 0.0 && p.y() == 0.0) return true;
  const double a = std::atan2(p.y(), p.x());
  for (double cand : {a - 2.0 * M_PI, a, a + 2.0 * M_PI})
    if (cand >= theta1 && cand <= theta2) return true;
  return false;
}

Eigen::Vector2d PiecewiseGermMap::apply(const Eigen::Vector2d& p) const {
  if (p.x() == 0.0 && p.y() == 0.0) return p;
  for (const Piece& piece : pieces_)
    if (piece.region.contains(p)) return piece.map->fwd(p);
  return p;
}

Eigen::Vector2d PiecewiseGermMap::apply_inverse(const Eigen::Vector2d& p) const {
  if (p.x() == 0.0 && p.y() == 0.0) return p;
  for (const Piece& piece : pieces_)
    if (piece.region.contains(p)) return piece.map->bwd(p);
  return p;
}

PiecewiseGermMap straighten_graph(const PuiseuxBranch& f) {
  if (f.is_zero())
    throw PreconditionError("straighten_graph: the zero branch has no decomposition");
  if (f.leading_coefficient() <= 0.0)
    throw PreconditionError("straighten_graph: leading coefficient must be positive");
  for (int j = 3; j <= 12; ++j) {
    const double x = std::pow(2.0, -j);
    if (f.eval(x) < 0.0)
      throw PreconditionError("straighten_graph: negative value at x = " + std::to_string(x));
  }
  std::vector<PiecewiseGermMap::Piece> pieces;
  pieces.push_back({Region{Region::Kind::quadrant, 0.0, 0.0},
                    make_straighten(make_puiseux_fn(f), f.order())});
  return PiecewiseGermMap(std::move(pieces));
}

namespace {

// Core recursion: families fs / gs (last entry is the exact zero germ) with
// the shared contact matrix. Straightens the second-lowest pair to the same
// monomial, shifts it away, and recurses on the reduced families.
GermTransformPtr stack_recursive(std::vector<GermFnPtr> fs, std::vector<GermFnPtr> gs,
                                 std::vector<std::vector<Rational>> contacts) {
  const int m = static_cast<int>(fs.size());
  if (m <= 1) return make_seq({});
  const Rational alpha = contacts[m - 2][m - 1];
  GermTransformPtr s_f = make_straighten(fs[m - 2], alpha);
  GermTransformPtr s_g = make_straighten(gs[m - 2], alpha);
  GermTransformPtr phi = make_monomial_shift(alpha);

  std::vector<GermFnPtr> fs2, gs2;
  for (int i = 0; i < m - 2; ++i) {
    fs2.push_back(make_diff_fn(fs[i], fs[m - 2]));
    gs2.push_back(make_diff_fn(gs[i], gs[m - 2]));
  }
  fs2.push_back(make_zero_fn());
  gs2.push_back(make_zero_fn());

  std::vector<std::vector<Rational>> c2(m - 1, std::vector<Rational>(m - 1, Rational(0)));
  for (int i = 0; i < m - 2; ++i) {
    for (int j = 0; j < m - 2; ++j) c2[i][j] = contacts[i][j];
    c2[i][m - 2] = contacts[i][m - 2];
    c2[m - 2][i] = contacts[i][m - 2];
  }

  GermTransformPtr inner = stack_recursive(std::move(fs2), std::move(gs2), std::move(c2));
  return make_seq({s_f, phi, inner, make_inverse(phi), make_inverse(s_g)});
}

struct SortedFamily {
  std::vector<PuiseuxBranch> branches;  // descending, zero branch last
  std::vector<std::vector<Rational>> contacts;
};

SortedFamily prepare_family(std::vector<PuiseuxBranch> branches, const char* who) {
  if (branches.empty()) throw PreconditionError(std::string(who) + ": empty branch list");
  int zeros = 0;
  for (const PuiseuxBranch& b : branches) {
    if (b.axis() != BranchAxis::PlusX)
      throw PreconditionError(std::string(who) + ": branches must be graphs over +x");
    if (b.is_zero()) {
      ++zeros;
    } else if (b.leading_coefficient() <= 0.0) {
      throw PreconditionError(std::string(who) + ": branches must be nonnegative near 0");
    }
  }
  if (zeros != 1)
    throw PreconditionError(std::string(who) + ": exactly one zero branch required");

  std::sort(branches.begin(), branches.end(),
            [](const PuiseuxBranch& a, const PuiseuxBranch& b) {
              return branch_below(b, a);  // descending
            });
  SortedFamily fam;
  const int m = static_cast<int>(branches.size());
  fam.contacts.assign(m, std::vector<Rational>(m, Rational(0)));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      fam.contacts[i][j] = contact_exponent(branches[i], branches[j]);
      fam.contacts[j][i] = fam.contacts[i][j];
    }
  fam.branches = std::move(branches);
  return fam;
}

}  // namespace

PiecewiseGermMap stack_graphs(std::vector<PuiseuxBranch> x_branches,
                              std::vector<PuiseuxBranch> y_branches) {
  if (x_branches.size() != y_branches.size())
    throw PreconditionError("stack_graphs: branch counts differ");
  SortedFamily fx = prepare_family(std::move(x_branches), "stack_graphs");
  SortedFamily fy = prepare_family(std::move(y_branches), "stack_graphs");
  if (fx.contacts != fy.contacts)
    throw NotEquivalentError("stack_graphs: contact exponents do not match");

  std::vector<GermFnPtr> fs, gs;
  for (const PuiseuxBranch& b : fx.branches)
    fs.push_back(b.is_zero() ? make_zero_fn() : make_puiseux_fn(b));
  for (const PuiseuxBranch& b : fy.branches)
    gs.push_back(b.is_zero() ? make_zero_fn() : make_puiseux_fn(b));

  std::vector<PiecewiseGermMap::Piece> pieces;
  pieces.push_back({Region{Region::Kind::quadrant, 0.0, 0.0},
                    stack_recursive(std::move(fs), std::move(gs), fx.contacts)});
  return PiecewiseGermMap(std::move(pieces));
}

std::vector<Eigen::Vector2d> sphere_points(const GermCurve& g, double r) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(g.size());
  for (const PuiseuxBranch& b : g.branches()) pts.push_back(b.point(b.sphere_parameter(r)));
  return pts;
}

namespace {

double finite_hausdorff(const std::vector<Eigen::Vector2d>& a,
                        const std::vector<Eigen::Vector2d>& b) {
  auto one_sided = [](const std::vector<Eigen::Vector2d>& p,
                      const std::vector<Eigen::Vector2d>& q) {
    double worst = 0.0;
    for (const auto& u : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& v : q) best = std::min(best, (u - v).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

struct ConePlan {
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::vector<int> x_branches;  // indices into X
  std::vector<int> y_branches;  // indices into Y
};

// Sorts chart-image functions by their value at probe abscissae, checking the
// order is stable across probes.
std::vector<int> sort_by_value(const std::vector<GermFnPtr>& fns, const char* who) {
  const int m = static_cast<int>(fns.size());
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  const double probes[] = {0x1p-6, 0x1p-7, 0x1p-8};
  std::vector<int> reference;
  for (double u : probes) {
    std::vector<double> vals(m);
    for (int i = 0; i < m; ++i) vals[i] = fns[i]->eval(u);
    std::vector<int> idx = order;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return vals[a] > vals[b]; });
    if (reference.empty()) {
      reference = idx;
    } else if (reference != idx) {
      throw PreconditionError(std::string(who) +
                              ": branch order is not separated at the probe radii");
    }
  }
  return reference;
}

}  // namespace

GermEquivalenceResult ambient_curve_equivalence(const GermCurve& x, const GermCurve& y) {
  auto sigma_opt = match_halfbranches(x, y);
  if (!sigma_opt)
    throw NotEquivalentError(
        "ambient_curve_equivalence: no contact-preserving matching of half-branches");
  const std::vector<int>& sigma = *sigma_opt;

  // sigma maps tangent groups onto tangent groups; pair each X group with its
  // image group and record the angular core the shared cone must cover.
  std::vector<int> y_group_of(y.size(), -1);
  for (int gi = 0; gi < static_cast<int>(y.tangent_groups().size()); ++gi)
    for (int idx : y.tangent_groups()[gi]) y_group_of[idx] = gi;

  std::vector<ConePlan> plans;
  for (const std::vector<int>& group : x.tangent_groups()) {
    const int target_group = y_group_of[sigma[group.front()]];
    for (int idx : group)
      if (y_group_of[sigma[idx]] != target_group)
        throw Error("ambient_curve_equivalence: matching does not respect tangent groups");
    ConePlan plan;
    plan.x_branches = group;
    plan.y_branches = y.tangent_groups()[target_group];
    const Eigen::Vector2d tx = x.branches()[group.front()].tangent();
    const Eigen::Vector2d ty = y.branches()[plan.y_branches.front()].tangent();
    const double ax = std::atan2(tx.y(), tx.x());
    const double gap = wrap_angle(std::atan2(ty.y(), ty.x()) - ax);
    if (std::abs(gap) >= M_PI / 2.0 - 1e-9)
      throw SearchError(
          "ambient_curve_equivalence: paired tangents are more than a quadrant apart",
          std::abs(gap));
    plan.theta1 = std::min(ax, ax + gap);
    plan.theta2 = std::max(ax, ax + gap);
    plans.push_back(std::move(plan));
  }

  // Aperture: start at pi/8 and halve until the padded cones are disjoint on
  // the circle and each spans less than a quadrant.
  double aperture = M_PI / 8.0;
  bool feasible = false;
  for (int attempt = 0; attempt < 8 && !feasible; ++attempt, aperture *= 0.5) {
    feasible = true;
    for (const ConePlan& p : plans)
      if (p.theta2 - p.theta1 + 2.0 * aperture >= M_PI / 2.0) feasible = false;
    std::vector<std::pair<double, double>> arcs;
    for (const ConePlan& p : plans) {
      double lo = p.theta1 - aperture;
      double hi = p.theta2 + aperture;
      while (lo >= M_PI) {
        lo -= 2.0 * M_PI;
        hi -= 2.0 * M_PI;
      }
      while (lo < -M_PI) {
        lo += 2.0 * M_PI;
        hi += 2.0 * M_PI;
      }
      arcs.push_back({lo, hi});
    }
    std::sort(arcs.begin(), arcs.end());
    for (std::size_t i = 0; i + 1 < arcs.size(); ++i)
      if (arcs[i].second >= arcs[i + 1].first) feasible = false;
    if (arcs.size() >= 2 &&
        arcs.back().second >= arcs.front().first + 2.0 * M_PI)
      feasible = false;
    if (feasible) break;
  }
  if (!feasible)
    throw SearchError("ambient_curve_equivalence: could not build disjoint cones", 0.0);

  std::vector<PiecewiseGermMap::Piece> pieces;
  for (const ConePlan& plan : plans) {
    const double t1 = plan.theta1 - aperture;
    const double t2 = plan.theta2 + aperture;
    const double span = t2 - t1;
    Eigen::Matrix2d rot;
    rot << std::cos(-t1), -std::sin(-t1), std::sin(-t1), std::cos(-t1);
    Eigen::Matrix2d cone_to_quadrant;
    cone_to_quadrant << std::tan(span), -1.0, 0.0, 1.0;
    const Eigen::Matrix2d chart = cone_to_quadrant * rot;

    std::vector<GermFnPtr> fx, fy;
    for (int idx : plan.x_branches)
      fx.push_back(make_chart_branch_fn(x.branches()[idx], chart));
    for (int idx : plan.y_branches)
      fy.push_back(make_chart_branch_fn(y.branches()[idx], chart));
    if (fy.size() != fx.size())
      throw Error("ambient_curve_equivalence: paired tangent groups have different sizes");
    std::vector<int> order_x = sort_by_value(fx, "ambient_curve_equivalence");
    std::vector<int> order_y = sort_by_value(fy, "ambient_curve_equivalence");

    const int g = static_cast<int>(fx.size());
    std::vector<std::vector<Rational>> cx(g + 1, std::vector<Rational>(g + 1, Rational(1)));
    std::vector<std::vector<Rational>> cy = cx;
    for (int i = 0; i < g; ++i)
      for (int j = i + 1; j < g; ++j) {
        cx[i][j] = cx[j][i] = contact_exponent(x.branches()[plan.x_branches[order_x[i]]],
                                               x.branches()[plan.x_branches[order_x[j]]]);
        cy[i][j] = cy[j][i] = contact_exponent(y.branches()[plan.y_branches[order_y[i]]],
                                               y.branches()[plan.y_branches[order_y[j]]]);
      }
    if (cx != cy)
      throw SearchError(
          "ambient_curve_equivalence: sorted stacking cannot realize the matching", 0.0);

    std::vector<GermFnPtr> fs, gs;
    for (int i = 0; i < g; ++i) fs.push_back(fx[order_x[i]]);
    for (int i = 0; i < g; ++i) gs.push_back(fy[order_y[i]]);
    fs.push_back(make_zero_fn());
    gs.push_back(make_zero_fn());

    GermTransformPtr lin = make_linear(chart);
    GermTransformPtr core = stack_recursive(std::move(fs), std::move(gs), cx);
    pieces.push_back({Region{Region::Kind::sector, t1, t2},
                      make_seq({lin, core, make_inverse(lin)})});
  }

  GermEquivalenceResult result;
  result.map = PiecewiseGermMap(std::move(pieces));
  result.sigma = sigma;
  for (int j = 4; j <= 12; ++j) {
    const double r = std::pow(2.0, -j);
    std::vector<Eigen::Vector2d> fx_pts;
    for (const Eigen::Vector2d& p : sphere_points(x, r))
      fx_pts.push_back(result.map.apply(p));
    result.sphere_hausdorff.push_back({r, finite_hausdorff(fx_pts, sphere_points(y, r))});
  }
  return result;
}

}  // namespace lipembed
