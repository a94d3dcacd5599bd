#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "lipembed/extension.hpp"
#include "lipembed/geometry.hpp"
#include "lipembed/germ_map.hpp"
#include "lipembed/projection.hpp"
#include "lipembed/puiseux.hpp"
#include "lipembed/tame_map.hpp"
#include "lipembed/verify.hpp"

namespace lipembed {

using Json = nlohmann::ordered_json;

// Deterministic writer: every real is rendered with %.17g so files round-trip
// and diff cleanly. Throws on NaN or infinity.
std::string dump_json(const Json& j);

Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Json to_json(const PointCloud& cloud);
PointCloud point_cloud_from_json(const Json& j);

Json to_json(const DistortionReport& report);

Json to_json(const ProjectionStep& step);
Json to_json(const ReductionResult& result);

Json to_json(const SampledLipschitzFunction& f);
Json to_json(const TameMap& map);
TameMap tame_map_from_json(const Json& j);

Json to_json(const PuiseuxBranch& branch);
PuiseuxBranch branch_from_json(const Json& j);
Json to_json(const GermCurve& curve);
GermCurve germ_curve_from_json(const Json& j);

Json to_json(const PiecewiseGermMap& map);
PiecewiseGermMap germ_map_from_json(const Json& j);

Json to_json(const SplitCoordinates& split);
Json to_json(const ExtensionResult& result);
Json to_json(const CertificationReport& report);

// {"pairing": [...]} with a bijection of the expected size.
std::vector<int> pairing_from_json(const Json& j, int expected_size);

}  // namespace lipembed
