#include <doctest.h>

#include "lipembed/extension.hpp"
#include "lipembed/germ_map.hpp"
#include "lipembed/json_io.hpp"
#include "lipembed/random.hpp"
#include "oracles.hpp"

using namespace lipembed;

TEST_CASE("dump_json renders reals losslessly") {
  Json j;
  j["pi"] = 3.141592653589793;
  j["tenth"] = 0.1;
  j["neg"] = -1.5e-300;
  const std::string text = dump_json(j);
  CHECK(text.find("3.141592653589793") != std::string::npos);
  CHECK(text.find("0.1000000000000000") != std::string::npos);
  const Json back = parse_json(text);
  CHECK(back.at("pi").get<double>() == 3.141592653589793);
  CHECK(back.at("tenth").get<double>() == 0.1);
  CHECK(back.at("neg").get<double>() == -1.5e-300);
}

TEST_CASE("dump_json is deterministic") {
  Json j;
  j["b"] = 2;
  j["a"] = Json::array({1.0, 2.5, Json{{"x", true}}});
  CHECK(dump_json(j) == dump_json(j));
}

TEST_CASE("malformed json raises ParseError") {
  CHECK_THROWS_AS(parse_json("{ not json"), ParseError);
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), ParseError);
  CHECK_THROWS_AS(point_cloud_from_json(parse_json("{\"points\": []}")), ParseError);
}

TEST_CASE("point cloud round trip") {
  SeededRng rng(91);
  const PointCloud cloud = oracle::random_cloud(7, 3, 1, rng);
  const PointCloud back = point_cloud_from_json(parse_json(dump_json(to_json(cloud))));
  CHECK(back.ambient_dim() == cloud.ambient_dim());
  CHECK(back.intrinsic_dim() == cloud.intrinsic_dim());
  CHECK((back.points().array() == cloud.points().array()).all());
}

TEST_CASE("tame map round trip preserves behavior bitwise") {
  Matrix x(3, 2), y(3, 2);
  x << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  y << 5.0, 5.0, 6.0, 7.0, -1.0, 2.0;
  const SampledMap f = SampledMap::identity_pairing(PointCloud(x, 0), PointCloud(y, 0));
  const ExtensionResult ext = extend_embedding(f, 0, ExtensionMode::semialgebraic, 1);

  const Json j = to_json(ext.F);
  const TameMap back = tame_map_from_json(parse_json(dump_json(j)));
  SeededRng rng(92);
  for (int trial = 0; trial < 50; ++trial) {
    Vector p(2);
    p << rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0);
    CHECK((back(p).array() == ext.F(p).array()).all());
  }
}

TEST_CASE("transvections reload as linear shears") {
  Matrix t(3, 3);
  t.setIdentity();
  t(0, 2) = 0.75;
  const TameMap map({LinearShearFactor{0, (Vector(3) << 0.0, 0.0, 0.75).finished()}}, 3);
  const TameMap back = tame_map_from_json(parse_json(dump_json(to_json(map))));
  CHECK(back.isotopy_ready());
  Vector p(3);
  p << 1.0, 2.0, 4.0;
  CHECK((back(p) - map(p)).norm() == 0.0);
}

TEST_CASE("reduction result serialization") {
  const ReductionResult result = whitney_reduce(oracle::moment_curve(40, 4), 3, 2);
  const Json j = to_json(result);
  CHECK(j.at("steps").size() == result.steps.size());
  CHECK(j.at("final_cloud").at("ambient_dim").get<int>() == 3);
  CHECK(j.at("composite_lower").get<double>() == result.composite_lower);
  // Frames serialize row by row.
  CHECK(j.at("steps").at(0).at("frame").size() == 3);
}

TEST_CASE("germ curve round trip") {
  const Json j = parse_json(R"({
    "label": "demo",
    "branches": [
      {"terms": [[3, 2, 1.0], [7, 4, 2.0]], "axis": "+x"},
      {"terms": [], "axis": "+x"},
      {"terms": [[2, 1, -0.5]], "axis": "-x"}
    ]
  })");
  const GermCurve curve = germ_curve_from_json(j);
  CHECK(curve.size() == 3);
  const GermCurve back = germ_curve_from_json(parse_json(dump_json(to_json(curve))));
  for (int i = 0; i < 3; ++i)
    CHECK(back.branches()[i].same_series(curve.branches()[i]));
}

TEST_CASE("piecewise germ map round trip preserves behavior") {
  const PuiseuxBranch zero({}, BranchAxis::PlusX);
  const PuiseuxBranch upper({{Rational(3, 2), 2.0}}, BranchAxis::PlusX);
  const PuiseuxBranch target({{Rational(3, 2), 1.0}}, BranchAxis::PlusX);
  const PiecewiseGermMap map = stack_graphs({zero, upper}, {zero, target});
  const PiecewiseGermMap back = germ_map_from_json(parse_json(dump_json(to_json(map))));
  SeededRng rng(93);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector2d p(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    CHECK((back.apply(p) - map.apply(p)).norm() == 0.0);
    CHECK((back.apply_inverse(p) - map.apply_inverse(p)).norm() == 0.0);
  }
}

TEST_CASE("pairing parsing validates bijections") {
  CHECK(pairing_from_json(parse_json(R"({"pairing": [2, 0, 1]})"), 3) ==
        std::vector<int>{2, 0, 1});
  CHECK_THROWS_AS(pairing_from_json(parse_json(R"({"pairing": [0, 1]})"), 3), ParseError);
}
