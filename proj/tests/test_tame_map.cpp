#include <doctest.h>

#include "lipembed/random.hpp"
#include "lipembed/tame_map.hpp"
#include "oracles.hpp"

using namespace lipembed;

namespace {

PointCloud line_cloud(std::initializer_list<double> xs) {
  Matrix pts(static_cast<int>(xs.size()), 1);
  int i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return PointCloud(pts, 1);
}

// Shear in R^2 on the second axis with offset p(x) = x on [0, 3].
ShearFactor linear_offset_shear() {
  return ShearFactor{1, 1.0, {0}, SampledLipschitzFunction(line_cloud({0.0, 3.0}), {0.0, 3.0})};
}

Matrix factor_matrix(const LinearShearFactor& f, int n) {
  Matrix m = Matrix::Identity(n, n);
  m.row(f.row) += f.coeffs.transpose();
  return m;
}

Matrix random_unimodular(int n, SeededRng& rng, int count) {
  Matrix m = Matrix::Identity(n, n);
  for (int t = 0; t < count; ++t) {
    const int i = static_cast<int>(rng.integer(n));
    int j = static_cast<int>(rng.integer(n - 1));
    if (j >= i) ++j;
    Matrix e = Matrix::Identity(n, n);
    e(i, j) = rng.uniform(-1.0, 1.0);
    m = e * m;
  }
  return m;
}

}  // namespace

TEST_CASE("eval and invert examples") {
  SUBCASE("empty factor list is the identity") {
    const TameMap id({}, 3);
    Vector p(3);
    p << 1.0, -2.0, 0.5;
    CHECK((id(p) - p).norm() == 0.0);
  }
  SUBCASE("single shear adds then subtracts") {
    const TameMap map({linear_offset_shear()}, 2);
    Vector p(2);
    p << 3.0, 4.0;
    const Vector q = map(p);
    CHECK(q[0] == doctest::Approx(3.0));
    CHECK(q[1] == doctest::Approx(7.0));
    CHECK((map.invert(q) - p).norm() <= 1e-12);
  }
  SUBCASE("composition matches factor-by-factor application") {
    Matrix rot(2, 2);
    rot << 0.0, -1.0, 1.0, 0.0;
    const TameMap map({linear_offset_shear(), LinearFactor(rot)}, 2);
    SeededRng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
      Vector p(2);
      p << rng.uniform(0.0, 3.0), rng.uniform(-2.0, 2.0);
      // Sequential oracle: apply the shear by hand, then the rotation.
      Vector expect(2);
      expect << p[0], p[1] + p[0];
      expect = rot * expect;
      CHECK((map(p) - expect).norm() <= 1e-12);
    }
  }
}

TEST_CASE("inverse map reverses factors") {
  Matrix rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;
  const TameMap map({linear_offset_shear(), LinearFactor(rot)}, 2);
  const TameMap inv = map.inverse();
  SeededRng rng(6);
  for (int trial = 0; trial < 25; ++trial) {
    Vector p(2);
    p << rng.uniform(0.0, 3.0), rng.uniform(-2.0, 2.0);
    CHECK((inv(map(p)) - p).norm() <= 1e-10);
  }
}

TEST_CASE("sl_decompose examples") {
  SUBCASE("identity decomposes to nothing") {
    CHECK(sl_decompose(Matrix::Identity(3, 3)).empty());
  }
  SUBCASE("an elementary transvection is returned as itself") {
    Matrix m(2, 2);
    m << 1.0, 1.0, 0.0, 1.0;
    const auto factors = sl_decompose(m);
    REQUIRE(factors.size() == 1);
    CHECK(factor_matrix(factors[0], 2).isApprox(m, 1e-14));
  }
  SUBCASE("diagonal unimodular matrix uses at most four transvections") {
    Matrix m(2, 2);
    m << 2.0, 0.0, 0.0, 0.5;
    const auto factors = sl_decompose(m);
    CHECK(factors.size() <= 4);
    Matrix product = Matrix::Identity(2, 2);
    for (const auto& f : factors) product = factor_matrix(f, 2) * product;
    CHECK((product - m).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("non-unimodular input is rejected") {
    Matrix m(2, 2);
    m << 2.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(sl_decompose(m), PreconditionError);
  }
}

TEST_CASE("sl_decompose handles zero pivots") {
  SUBCASE("quarter-turn rotation") {
    Matrix m(2, 2);
    m << 0.0, -1.0, 1.0, 0.0;
    Matrix product = Matrix::Identity(2, 2);
    for (const auto& f : sl_decompose(m)) product = factor_matrix(f, 2) * product;
    CHECK((product - m).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("cyclic permutation") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 2) = 1.0;
    m(1, 0) = 1.0;
    m(2, 1) = 1.0;  // 3-cycle, determinant 1
    Matrix product = Matrix::Identity(3, 3);
    for (const auto& f : sl_decompose(m)) product = factor_matrix(f, 3) * product;
    CHECK((product - m).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sl_decompose round-trips random unimodular matrices") {
  SeededRng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.integer(4));
    const Matrix m = random_unimodular(n, rng, 3 * n);
    const auto factors = sl_decompose(m);
    CHECK(static_cast<int>(factors.size()) <= n * n + 4 * n);
    Matrix product = Matrix::Identity(n, n);
    for (const auto& f : factors) product = factor_matrix(f, n) * product;
    CHECK((product - m).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("projection_to_tame examples") {
  SUBCASE("graph of |x| is flattened exactly on samples") {
    Matrix pts(5, 2);
    pts << -1.0, 1.0, -0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0;
    const PointCloud cloud(pts, 1);
    const TameMap pi = projection_to_tame(cloud, 1);
    for (int i = 0; i < cloud.size(); ++i) {
      const Vector image = pi(cloud.point(i));
      CHECK(image[0] == doctest::Approx(pts(i, 0)));
      CHECK(std::abs(image[1]) <= 1e-12);
    }
  }
  SUBCASE("cloud already inside the subspace gets zero offsets") {
    Matrix pts(3, 3);
    pts << 0.0, 0.0, 0.0, 1.0, 2.0, 0.0, -1.0, 1.0, 0.0;
    const TameMap pi = projection_to_tame(PointCloud(pts, 2), 2);
    for (const TameFactor& f : pi.factors()) {
      const auto& shear = std::get<ShearFactor>(f);
      for (double v : shear.offset.values()) CHECK(v == 0.0);
    }
  }
  SUBCASE("two-point interpolating shear") {
    Matrix pts(2, 2);
    pts << 0.0, 0.0, 1.0, 1.0;
    const TameMap pi = projection_to_tame(PointCloud(pts, 1), 1);
    REQUIRE(pi.factors().size() == 1);
    const auto& shear = std::get<ShearFactor>(pi.factors()[0]);
    Vector q(1);
    q << 0.0;
    CHECK(shear.offset(q) == doctest::Approx(0.0));
    q << 1.0;
    CHECK(shear.offset(q) == doctest::Approx(1.0));
  }
  SUBCASE("non-injective projection is rejected with witnesses") {
    Matrix pts(2, 2);
    pts << 0.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_WITH_AS(projection_to_tame(PointCloud(pts, 1), 1),
                         doctest::Contains("collapses samples"), PreconditionError);
  }
}

TEST_CASE("graph_transfer examples") {
  SUBCASE("two points in the plane") {
    Matrix x(2, 2), y(2, 2);
    x << 0.0, 0.0, 1.0, 0.0;
    y << 0.0, 0.0, 0.0, 2.0;
    const SampledMap f = SampledMap::identity_pairing(PointCloud(x, 1), PointCloud(y, 1));
    const TameMap F = graph_transfer(f, 1);
    CHECK((F(f.source().point(0)) - f.image(0)).norm() <= 1e-9);
    CHECK((F(f.source().point(1)) - f.image(1)).norm() <= 1e-9);
  }
  SUBCASE("single point") {
    Matrix x(1, 2), y(1, 2);
    x << 0.5, 0.0;
    y << 0.0, -3.0;
    const SampledMap f = SampledMap::identity_pairing(PointCloud(x, 0), PointCloud(y, 0));
    const TameMap F = graph_transfer(f, 1);
    CHECK((F(f.source().point(0)) - f.image(0)).norm() <= 1e-9);
  }
  SUBCASE("curve samples in R^4") {
    const int m = 20;
    Matrix x(m, 4), y(m, 4);
    for (int i = 0; i < m; ++i) {
      const double t = static_cast<double>(i) / (m - 1);
      x.row(i) << t, 0.0, 0.0, 0.0;
      y.row(i) << 0.0, 0.0, t, t * t;
    }
    const SampledMap f = SampledMap::identity_pairing(PointCloud(x, 1), PointCloud(y, 1));
    const TameMap F = graph_transfer(f, 2);
    for (int i = 0; i < m; ++i)
      CHECK((F(f.source().point(i)) - f.image(i)).norm() <= 1e-9);
  }
  SUBCASE("subspace violation is rejected") {
    Matrix x(2, 2), y(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    y << 0.0, 0.0, 0.0, 2.0;
    CHECK_THROWS_AS(
        graph_transfer(
            SampledMap::identity_pairing(PointCloud(x, 1), PointCloud(y, 1)), 1),
        PreconditionError);
  }
}

TEST_CASE("isotopy_eval examples") {
  const TameMap map({linear_offset_shear()}, 2);
  Vector p(2);
  p << 3.0, 4.0;
  SUBCASE("t = 0 is the point, bitwise") {
    const Vector q = isotopy_eval(map, 0.0, p);
    CHECK((q.array() == p.array()).all());
  }
  SUBCASE("t = 1 matches eval, bitwise") {
    CHECK((isotopy_eval(map, 1.0, p).array() == map(p).array()).all());
  }
  SUBCASE("t = 0.5 halves the offset") {
    const Vector q = isotopy_eval(map, 0.5, p);
    CHECK(q[0] == doctest::Approx(3.0));
    CHECK(q[1] == doctest::Approx(5.5));
  }
  SUBCASE("t outside [0,1] is rejected") {
    CHECK_THROWS_AS(isotopy_eval(map, 1.5, p), PreconditionError);
  }
  SUBCASE("undecomposed linear factors are rejected") {
    Matrix rot(2, 2);
    rot << 0.0, -1.0, 1.0, 0.0;
    const TameMap with_linear({LinearFactor(rot)}, 2);
    CHECK_THROWS_AS(isotopy_eval(with_linear, 0.5, p), PreconditionError);
    CHECK_NOTHROW(isotopy_eval(with_linear.decomposed(), 0.5, p));
  }
}

TEST_CASE("isotopy continuity in t") {
  const TameMap map({linear_offset_shear()}, 2);
  Vector p(2);
  p << 2.0, -1.0;
  const double offset_magnitude = 2.0;  // p(x) = x at x = 2
  double prev_t = 0.0;
  Vector prev = isotopy_eval(map, 0.0, p);
  for (int i = 1; i <= 100; ++i) {
    const double t = i / 100.0;
    const Vector cur = isotopy_eval(map, t, p);
    CHECK((cur - prev).norm() <= offset_magnitude * (t - prev_t) * (1.0 + 1e-9));
    prev = cur;
    prev_t = t;
  }
}

TEST_CASE("inverse exactness on random points") {
  SeededRng rng(77);
  Matrix rot = random_unimodular(3, rng, 6);
  Matrix dom(4, 2);
  dom << 0.0, 0.0, 1.0, 0.5, -1.0, 2.0, 2.0, -1.0;
  std::vector<double> values{0.0, 1.0, -2.0, 0.5};
  const TameMap map(
      {LinearFactor(rot),
       ShearFactor{2, 1.0, {0, 1}, SampledLipschitzFunction(PointCloud(dom, 2), values)}},
      3);
  for (int trial = 0; trial < 10000; ++trial) {
    Vector p(3);
    for (int c = 0; c < 3; ++c) p[c] = rng.uniform(-10.0, 10.0);
    CHECK((map.invert(map(p)) - p).norm() <= 1e-8);
  }
}

TEST_CASE("composed distortion is sub-multiplicative on samples") {
  SeededRng rng(123);
  const PointCloud cloud = oracle::random_cloud(15, 3, 2, rng, 2.0);
  Matrix dom(3, 2);
  dom << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  const TameMap f1({ShearFactor{2, 1.0, {0, 1},
                                SampledLipschitzFunction(PointCloud(dom, 2), {0.0, 2.0, -1.0})}},
                   3);
  const TameMap f2({LinearFactor(random_unimodular(3, rng, 5))}, 3);

  auto map_cloud = [&](const TameMap& f, const PointCloud& c) {
    Matrix out(c.size(), 3);
    for (int i = 0; i < c.size(); ++i) out.row(i) = f(c.point(i)).transpose();
    return PointCloud(out, c.intrinsic_dim());
  };
  const PointCloud mid = map_cloud(f1, cloud);
  const PointCloud end = map_cloud(f2, mid);
  const double upper1 = distortion(SampledMap::identity_pairing(cloud, mid)).upper;
  const double upper2 = distortion(SampledMap::identity_pairing(mid, end)).upper;
  const double total = distortion(SampledMap::identity_pairing(cloud, end)).upper;
  CHECK(total <= upper1 * upper2 * (1.0 + 1e-9));
}

TEST_CASE("factor determinants are 1") {
  Matrix bad(2, 2);
  bad << 2.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(LinearFactor{bad}, PreconditionError);
  SeededRng rng(31);
  const Matrix good = random_unimodular(4, rng, 8);
  CHECK(std::abs(LinearFactor(good).matrix().determinant() - 1.0) <= 1e-10);
}
