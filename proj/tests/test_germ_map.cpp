#include <doctest.h>

#include <cmath>

#include "lipembed/germ_map.hpp"
#include "lipembed/random.hpp"

using namespace lipembed;

namespace {

PuiseuxBranch branch(std::initializer_list<std::pair<Rational, double>> terms,
                     BranchAxis axis = BranchAxis::PlusX) {
  std::vector<PuiseuxTerm> list;
  for (const auto& [e, c] : terms) list.push_back({e, c});
  return PuiseuxBranch(std::move(list), axis);
}

PuiseuxBranch zero_branch() { return PuiseuxBranch({}, BranchAxis::PlusX); }

}  // namespace

TEST_CASE("straighten_graph examples") {
  SUBCASE("x^2 (1 + x) straightens onto x^2") {
    const PuiseuxBranch f = branch({{Rational(2), 1.0}, {Rational(3), 1.0}});
    const PiecewiseGermMap map = straighten_graph(f);
    for (double x = 0.01; x <= 0.5; x += 0.01) {
      const Eigen::Vector2d image = map.apply({x, f.eval(x)});
      CHECK(image.x() == doctest::Approx(x));
      CHECK(image.y() == doctest::Approx(x * x).epsilon(1e-9));
    }
  }
  SUBCASE("a pure monomial straightens to the identity") {
    const PuiseuxBranch f = branch({{Rational(7, 4), 1.0}});
    const PiecewiseGermMap map = straighten_graph(f);
    for (double x = 0.0; x <= 0.5; x += 0.05)
      for (double y = 0.0; y <= 0.5; y += 0.05) {
        const Eigen::Vector2d image = map.apply({x, y});
        CHECK(image.x() == doctest::Approx(x).epsilon(1e-14));
        CHECK(image.y() == doctest::Approx(y).epsilon(1e-12));
      }
  }
  SUBCASE("points outside the quadrant are fixed exactly") {
    const PiecewiseGermMap map = straighten_graph(branch({{Rational(2), 1.0}}));
    const Eigen::Vector2d p(-0.3, 0.2), q(0.3, -0.2);
    CHECK((map.apply(p) - p).norm() == 0.0);
    CHECK((map.apply(q) - q).norm() == 0.0);
  }
  SUBCASE("negative leading coefficient is rejected") {
    CHECK_THROWS_AS(straighten_graph(branch({{Rational(2), -1.0}})), PreconditionError);
  }
}

TEST_CASE("stack_graphs examples") {
  SUBCASE("two branches: 2x^(3/2) onto x^(3/2)") {
    const PiecewiseGermMap map =
        stack_graphs({zero_branch(), branch({{Rational(3, 2), 2.0}})},
                     {zero_branch(), branch({{Rational(3, 2), 1.0}})});
    for (int j = 3; j <= 12; ++j) {
      const double x = std::pow(2.0, -j);
      const Eigen::Vector2d image = map.apply({x, 2.0 * std::pow(x, 1.5)});
      CHECK(image.x() == doctest::Approx(x));
      CHECK(std::abs(image.y() - std::pow(x, 1.5)) <= 1e-6 * x);
    }
  }
  SUBCASE("identical stacks give the identity on branch samples") {
    const std::vector<PuiseuxBranch> fam{
        zero_branch(), branch({{Rational(3, 2), 1.0}}),
        branch({{Rational(3, 2), 1.0}, {Rational(7, 4), 1.0}})};
    const PiecewiseGermMap map = stack_graphs(fam, fam);
    for (const PuiseuxBranch& b : fam)
      for (int j = 3; j <= 12; ++j) {
        const double x = std::pow(2.0, -j);
        const Eigen::Vector2d p(x, b.eval(x));
        CHECK((map.apply(p) - p).norm() <= 1e-9);
      }
  }
  SUBCASE("three nested branches map branchwise") {
    // alpha = 3/2 between the two lower nonzero branches, contact 7/4 above.
    const std::vector<PuiseuxBranch> xs{
        zero_branch(), branch({{Rational(3, 2), 1.0}}),
        branch({{Rational(3, 2), 1.0}, {Rational(7, 4), 2.0}})};
    const std::vector<PuiseuxBranch> ys{
        zero_branch(), branch({{Rational(3, 2), 3.0}}),
        branch({{Rational(3, 2), 3.0}, {Rational(7, 4), 1.0}})};
    const PiecewiseGermMap map = stack_graphs(xs, ys);
    for (std::size_t b = 0; b < xs.size(); ++b)
      for (int j = 4; j <= 12; ++j) {
        const double x = std::pow(2.0, -j);
        const Eigen::Vector2d image = map.apply({x, xs[b].eval(x)});
        CHECK(image.x() == doctest::Approx(x));
        CHECK(std::abs(image.y() - ys[b].eval(x)) <= 1e-6 * x);
      }
  }
  SUBCASE("contact mismatch is detected") {
    CHECK_THROWS_AS(
        stack_graphs({zero_branch(), branch({{Rational(3, 2), 1.0}})},
                     {zero_branch(), branch({{Rational(5, 4), 1.0}})}),
        NotEquivalentError);
  }
  SUBCASE("the zero branch must be present") {
    CHECK_THROWS_AS(stack_graphs({branch({{Rational(3, 2), 1.0}})},
                                 {branch({{Rational(3, 2), 1.0}})}),
                    PreconditionError);
  }
}

TEST_CASE("stack_graphs is identity outside the quadrant") {
  const PiecewiseGermMap map =
      stack_graphs({zero_branch(), branch({{Rational(2), 1.0}})},
                   {zero_branch(), branch({{Rational(2), 2.0}})});
  SeededRng rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Vector2d p(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (p.x() >= 0.0 && p.y() >= 0.0) p.x() = -p.x() - 0.1;
    CHECK((map.apply(p) - p).norm() == 0.0);
  }
}

TEST_CASE("piecewise germ maps invert on a polar grid") {
  const PiecewiseGermMap map =
      stack_graphs({zero_branch(), branch({{Rational(3, 2), 2.0}}),
                    branch({{Rational(3, 2), 2.0}, {Rational(2), 1.0}})},
                   {zero_branch(), branch({{Rational(3, 2), 1.0}}),
                    branch({{Rational(3, 2), 1.0}, {Rational(2), 3.0}})});
  for (int j = 3; j <= 12; ++j) {
    const double r = std::pow(2.0, -j);
    for (int a = 0; a < 720; ++a) {
      const double theta = 2.0 * M_PI * a / 720.0;
      const Eigen::Vector2d p(r * std::cos(theta), r * std::sin(theta));
      const Eigen::Vector2d q = map.apply_inverse(map.apply(p));
      CHECK((q - p).norm() <= 1e-6 * r);
    }
  }
}

TEST_CASE("region boundaries agree with the identity within tolerance") {
  const PiecewiseGermMap map =
      stack_graphs({zero_branch(), branch({{Rational(3, 2), 1.0}})},
                   {zero_branch(), branch({{Rational(3, 2), 2.0}})});
  // Points on the boundary of Q (both axes) stay put up to roundoff.
  for (int j = 3; j <= 12; ++j) {
    const double r = std::pow(2.0, -j);
    CHECK((map.apply({r, 0.0}) - Eigen::Vector2d(r, 0.0)).norm() <= 1e-9 * r);
    CHECK((map.apply({0.0, r}) - Eigen::Vector2d(0.0, r)).norm() <= 1e-9 * r);
  }
}

TEST_CASE("ambient_curve_equivalence of a germ with itself is the identity") {
  const GermCurve g({branch({{Rational(1), 1.0}, {Rational(3, 2), 0.3}}),
                     branch({{Rational(1), 1.0}, {Rational(3, 2), 0.6}}),
                     branch({{Rational(2), -0.2}}, BranchAxis::MinusX)});
  const GermEquivalenceResult result = ambient_curve_equivalence(g, g);
  for (int j = 4; j <= 12; ++j) {
    const double r = std::pow(2.0, -j);
    for (const Eigen::Vector2d& p : sphere_points(g, r))
      CHECK((result.map.apply(p) - p).norm() <= 1e-9);
  }
}

TEST_CASE("ambient_curve_equivalence on the swapped-contact configuration") {
  // Three branches sharing tangent and pairwise contact 7/4; the paired germ
  // swaps the middle coefficient so the sets genuinely differ.
  const GermCurve x({branch({{Rational(3, 2), 0.3}}),
                     branch({{Rational(3, 2), 0.3}, {Rational(7, 4), 0.05}}),
                     branch({{Rational(3, 2), 0.3}, {Rational(7, 4), 0.15}})},
                    "X");
  const GermCurve y({branch({{Rational(3, 2), 0.3}}),
                     branch({{Rational(3, 2), 0.3}, {Rational(7, 4), 0.10}}),
                     branch({{Rational(3, 2), 0.3}, {Rational(7, 4), 0.15}})},
                    "Y");
  const GermEquivalenceResult result = ambient_curve_equivalence(x, y);

  SUBCASE("sphere-wise Hausdorff bound") {
    for (const auto& [r, h] : result.sphere_hausdorff) CHECK(h <= 0.05 * r);
  }
  SUBCASE("identity outside the declared cones, exactly") {
    SeededRng rng(77);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const double theta = rng.uniform(-M_PI, M_PI);
      const double r = rng.uniform(1e-4, 0.1);
      const Eigen::Vector2d p(r * std::cos(theta), r * std::sin(theta));
      bool inside = false;
      for (const auto& piece : result.map.pieces())
        if (piece.region.contains(p)) inside = true;
      if (inside) continue;
      ++checked;
      const Eigen::Vector2d q = result.map.apply(p);
      CHECK((q.array() == p.array()).all());
    }
    CHECK(checked > 100);
  }
  SUBCASE("round trip on a polar grid") {
    for (int j = 3; j <= 12; ++j) {
      const double r = std::pow(2.0, -j);
      for (int a = 0; a < 720; ++a) {
        const double theta = 2.0 * M_PI * a / 720.0;
        const Eigen::Vector2d p(r * std::cos(theta), r * std::sin(theta));
        CHECK((result.map.apply_inverse(result.map.apply(p)) - p).norm() <= 1e-6 * r);
      }
    }
  }
}

TEST_CASE("ambient_curve_equivalence with several tangent groups") {
  const GermCurve x({branch({{Rational(2), 0.3}}),
                     branch({{Rational(2), 0.7}}),
                     branch({{Rational(3, 2), 0.4}}, BranchAxis::MinusX)},
                    "X");
  const GermCurve y({branch({{Rational(2), 0.2}}),
                     branch({{Rational(2), 0.9}}),
                     branch({{Rational(3, 2), 0.5}}, BranchAxis::MinusX)},
                    "Y");
  const GermEquivalenceResult result = ambient_curve_equivalence(x, y);
  for (const auto& [r, h] : result.sphere_hausdorff) CHECK(h <= 0.05 * r);
}

TEST_CASE("ambient_curve_equivalence across distinct tangents uses a hull cone") {
  // Single branches with tangents tilted by arctan(0.2): the shared cone must
  // cover both, and the map still carries the X branch onto the Y branch.
  const GermCurve x({branch({{Rational(2), 0.4}})}, "X");
  const GermCurve y({branch({{Rational(1), 0.2}, {Rational(2), 0.4}})}, "Y");
  const GermEquivalenceResult result = ambient_curve_equivalence(x, y);
  REQUIRE(result.map.pieces().size() == 1);
  const PuiseuxBranch& target = y.branches()[0];
  for (int j = 4; j <= 12; ++j) {
    const double r = std::pow(2.0, -j);
    const PuiseuxBranch& source = x.branches()[0];
    const Eigen::Vector2d q = result.map.apply(source.point(source.sphere_parameter(r)));
    // Image lies on the Y branch (graph over x) up to roundoff.
    CHECK(std::abs(q.y() - target.eval(q.x())) <= 1e-9 * r + 1e-15);
  }
}

TEST_CASE("ambient_curve_equivalence handles cones straddling the angle cut") {
  // Tangent half-lines just above and below the negative x-axis: the two
  // cones sit on either side of the atan2 branch cut and must stay disjoint.
  const GermCurve x({branch({{Rational(1), 0.15}, {Rational(2), 0.1}}, BranchAxis::MinusX),
                     branch({{Rational(1), -0.15}, {Rational(2), 0.1}}, BranchAxis::MinusX)},
                    "X");
  const GermCurve y({branch({{Rational(1), 0.15}, {Rational(2), 0.15}}, BranchAxis::MinusX),
                     branch({{Rational(1), -0.15}, {Rational(2), 0.05}}, BranchAxis::MinusX)},
                    "Y");
  const GermEquivalenceResult result = ambient_curve_equivalence(x, y);
  REQUIRE(result.map.pieces().size() == 2);
  // Disjoint ownership around a full circle.
  for (int a = 0; a < 2000; ++a) {
    const double theta = -M_PI + 2.0 * M_PI * a / 2000.0;
    const Eigen::Vector2d p(0.01 * std::cos(theta), 0.01 * std::sin(theta));
    int owners = 0;
    for (const auto& piece : result.map.pieces())
      if (piece.region.contains(p)) ++owners;
    CHECK(owners <= 1);
  }
  for (const auto& [r, h] : result.sphere_hausdorff)
    if (r <= 0.02) CHECK(h <= 0.05 * r);
}

TEST_CASE("mismatched contact multisets are not equivalent") {
  const GermCurve x({branch({{Rational(1), 1.0}}),
                     branch({{Rational(1), 1.0}, {Rational(7, 4), 1.0}})});
  const GermCurve y({branch({{Rational(1), 1.0}}),
                     branch({{Rational(1), 1.0}, {Rational(5, 4), 1.0}})});
  CHECK_THROWS_AS(ambient_curve_equivalence(x, y), NotEquivalentError);
}
