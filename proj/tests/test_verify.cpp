#include <doctest.h>

#include <cmath>

#include "lipembed/extension.hpp"
#include "lipembed/verify.hpp"
#include "oracles.hpp"

using namespace lipembed;

namespace {

PointCloud segment_cloud(int m) {
  Matrix pts(m, 2);
  for (int i = 0; i < m; ++i) pts.row(i) << static_cast<double>(i) / (m - 1), 0.0;
  return PointCloud(pts, 1);
}

PointCloud circle_cloud(int m) {
  Matrix pts(m, 2);
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * M_PI * i / m;
    pts.row(i) << std::cos(theta), std::sin(theta);
  }
  return PointCloud(pts, 1);
}

}  // namespace

TEST_CASE("lne_ratio examples") {
  SUBCASE("collinear samples have ratio one") {
    CHECK(lne_ratio(segment_cloud(40), 0.1) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("circle samples approach pi/2") {
    CHECK(std::abs(lne_ratio(circle_cloud(360), 0.1) - M_PI / 2.0) <= 0.05);
  }
  SUBCASE("a U-shape ratio grows as the gap shrinks") {
    // Two parallel segments joined at one end; geodesics between the free
    // ends must walk the whole U.
    auto u_shape = [](double gap) {
      const int m = 40;
      const int bridge = 8;
      Matrix pts(2 * m + bridge, 2);
      for (int i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / (m - 1);
        pts.row(i) << t, 0.0;
        pts.row(m + i) << t, gap;
      }
      for (int i = 0; i < bridge; ++i)
        pts.row(2 * m + i) << 1.0, gap * (i + 1) / (bridge + 1);
      return PointCloud(pts, 1);
    };
    const double wide = lne_ratio(u_shape(0.5), 0.08);
    const double tight = lne_ratio(u_shape(0.2), 0.05);
    CHECK(wide > 2.0);
    CHECK(tight > wide);
  }
  SUBCASE("disconnected graph is an error") {
    CHECK_THROWS_AS(lne_ratio(segment_cloud(10), 0.01), PreconditionError);
  }
}

TEST_CASE("lne_ratio is at least one") {
  SeededRng rng(60);
  const PointCloud cloud = oracle::random_cloud(25, 3, 2, rng);
  const double rho = default_rho(cloud);
  CHECK(lne_ratio(cloud, rho) >= 1.0 - 1e-12);
}

TEST_CASE("hausdorff examples") {
  SUBCASE("identical clouds") {
    const PointCloud c = segment_cloud(10);
    CHECK(hausdorff(c, c) == 0.0);
  }
  SUBCASE("two singletons") {
    Matrix a(1, 2), b(1, 2);
    a << 0.0, 0.0;
    b << 1.0, 0.0;
    CHECK(hausdorff(PointCloud(a, 0), PointCloud(b, 0)) == doctest::Approx(1.0));
  }
  SUBCASE("one-sided sup attained") {
    Matrix a(2, 2), b(1, 2);
    a << 0.0, 0.0, 2.0, 0.0;
    b << 0.0, 0.0;
    CHECK(hausdorff(PointCloud(a, 0), PointCloud(b, 0)) == doctest::Approx(2.0));
  }
  SUBCASE("dimension mismatch") {
    Matrix a(1, 2), b(1, 3);
    a << 0.0, 0.0;
    b << 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(hausdorff(PointCloud(a, 0), PointCloud(b, 0)), PreconditionError);
  }
}

TEST_CASE("hausdorff is symmetric and satisfies the triangle inequality") {
  SeededRng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud a = oracle::random_cloud(8, 2, 1, rng);
    const PointCloud b = oracle::random_cloud(11, 2, 1, rng);
    const PointCloud c = oracle::random_cloud(5, 2, 1, rng);
    CHECK(hausdorff(a, b) == doctest::Approx(hausdorff(b, a)));
    CHECK(hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-12);
  }
}

TEST_CASE("certify_extension end to end") {
  Matrix x(3, 2), y(3, 2);
  x << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  y << 5.0, 5.0, 6.0, 7.0, -1.0, 2.0;
  const SampledMap f =
      SampledMap::identity_pairing(PointCloud(x, 0), PointCloud(y, 0));
  const ExtensionResult ext = extend_embedding(f, 0, ExtensionMode::semialgebraic, 1);

  SUBCASE("a correct extension passes") {
    const CertificationReport report = certify_extension(ext.F, f, GridSpec{});
    CHECK(report.pass());
  }
  SUBCASE("the identity map on an identity pairing passes trivially") {
    const SampledMap id = SampledMap::identity_pairing(PointCloud(x, 0), PointCloud(x, 0));
    const CertificationReport report = certify_extension(TameMap({}, 2), id, GridSpec{});
    CHECK(report.pass());
    CHECK(report.interpolation_error == 0.0);
  }
  SUBCASE("a corrupted shear value fails interpolation and is localized") {
    std::vector<TameFactor> factors = ext.F.factors();
    for (TameFactor& factor : factors) {
      if (auto* shear = std::get_if<ShearFactor>(&factor)) {
        std::vector<double> values = shear->offset.values();
        values[0] += 0.1;
        shear->offset = SampledLipschitzFunction(shear->offset.domain(), values);
        break;
      }
    }
    const TameMap corrupted(std::move(factors), ext.F.dim());
    const CertificationReport report = certify_extension(corrupted, f, GridSpec{});
    CHECK(!report.interpolation_ok);
    CHECK(report.worst_sample >= 0);
    CHECK(report.interpolation_error > 1e-3);
  }
}

TEST_CASE("certify_extension is deterministic given the grid") {
  Matrix x(3, 2), y(3, 2);
  x << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  y << 5.0, 5.0, 6.0, 7.0, -1.0, 2.0;
  const SampledMap f =
      SampledMap::identity_pairing(PointCloud(x, 0), PointCloud(y, 0));
  const ExtensionResult ext = extend_embedding(f, 0, ExtensionMode::semialgebraic, 1);
  const CertificationReport a = certify_extension(ext.F, f, GridSpec{});
  const CertificationReport b = certify_extension(ext.F, f, GridSpec{});
  CHECK(a.interpolation_error == b.interpolation_error);
  CHECK(a.inverse_roundtrip_max == b.inverse_roundtrip_max);
}
