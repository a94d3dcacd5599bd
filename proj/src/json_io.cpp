#include "lipembed/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lipembed/germ_nodes.hpp"

namespace lipembed {

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw Error("dump_json: non-finite real");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void escape_string(const std::string& s, std::string& out) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

void dump_value(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case Json::value_t::number_float: out += format_double(j.get<double>()); break;
    case Json::value_t::string: escape_string(j.get<std::string>(), out); break;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      // Arrays of scalars inline; nested structures one element per line.
      bool scalar = true;
      for (const auto& e : j)
        if (e.is_structured()) scalar = false;
      out.push_back('[');
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += scalar ? ", " : ",";
        if (!scalar) {
          out.push_back('\n');
          out += pad_in;
        }
        dump_value(e, out, depth + 1);
        first = false;
      }
      if (!scalar) {
        out.push_back('\n');
        out += pad;
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        out.push_back('\n');
        out += pad_in;
        escape_string(it.key(), out);
        out += ": ";
        dump_value(it.value(), out, depth + 1);
        first = false;
      }
      out.push_back('\n');
      out += pad;
      out.push_back('}');
      break;
    }
    default:
      throw Error("dump_json: unsupported value type");
  }
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ParseError(std::string(what) + ": expected a non-empty matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Json& row = j.at(i);
    if (static_cast<int>(row.size()) != cols)
      throw ParseError(std::string(what) + ": ragged matrix rows");
    for (int c = 0; c < cols; ++c) m(i, c) = row.at(c).get<double>();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  Vector v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

Json rational_to_json(const Rational& r) { return Json::array({r.num(), r.den()}); }

Rational rational_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a rational [num, den]");
  return Rational(j.at(0).get<long long>(), j.at(1).get<long long>());
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_value(j, out, 0);
  out.push_back('\n');
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("JSON parse failure: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
}

Json to_json(const PointCloud& cloud) {
  Json j;
  j["label"] = cloud.label();
  j["ambient_dim"] = cloud.ambient_dim();
  j["intrinsic_dim"] = cloud.intrinsic_dim();
  j["points"] = matrix_to_json(cloud.points());
  return j;
}

PointCloud point_cloud_from_json(const Json& j) {
  try {
    const int n = j.at("ambient_dim").get<int>();
    const int k = j.at("intrinsic_dim").get<int>();
    const Json& pts = j.at("points");
    if (!pts.is_array() || pts.empty())
      throw ParseError("point cloud: empty points array");
    Matrix m(static_cast<int>(pts.size()), n);
    for (int i = 0; i < m.rows(); ++i) {
      if (static_cast<int>(pts.at(i).size()) != n)
        throw ParseError("point cloud: point " + std::to_string(i) +
                         " does not have ambient_dim coordinates");
      for (int c = 0; c < n; ++c) m(i, c) = pts.at(i).at(c).get<double>();
    }
    return PointCloud(m, k, j.value("label", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("point cloud: ") + e.what());
  }
}

Json to_json(const DistortionReport& report) {
  Json j;
  j["lower"] = report.lower;
  j["upper"] = report.upper;
  j["witness_lower"] = Json::array({report.witness_lower.first, report.witness_lower.second});
  j["witness_upper"] = Json::array({report.witness_upper.first, report.witness_upper.second});
  j["injective"] = report.injective;
  return j;
}

Json to_json(const ProjectionStep& step) {
  Json j;
  j["direction"] = vector_to_json(step.direction.vector());
  j["epsilon"] = step.epsilon;
  j["frame"] = matrix_to_json(step.frame);
  j["resulting_dim"] = step.resulting_dim;
  return j;
}

Json to_json(const ReductionResult& result) {
  Json j;
  Json steps = Json::array();
  for (const ProjectionStep& s : result.steps) steps.push_back(to_json(s));
  j["steps"] = std::move(steps);
  j["final_cloud"] = to_json(result.final_cloud);
  j["surviving_indices"] = result.surviving_indices;
  j["composite_lower"] = result.composite_lower;
  j["composite_upper"] = result.composite_upper;
  if (result.final_radius) j["final_radius"] = *result.final_radius;
  return j;
}

Json to_json(const SampledLipschitzFunction& f) {
  Json j;
  j["domain"] = to_json(f.domain());
  j["values"] = f.values();
  j["L"] = f.constant();
  return j;
}

Json to_json(const TameMap& map) {
  Json factors = Json::array();
  for (const TameFactor& f : map.factors()) {
    if (const auto* s = std::get_if<ShearFactor>(&f)) {
      Json entry;
      entry["axis"] = s->axis;
      entry["sign"] = s->sign;
      entry["inputs"] = s->inputs;
      entry["domain"] = to_json(s->offset.domain());
      entry["values"] = s->offset.values();
      entry["L"] = s->offset.constant();
      factors.push_back(std::move(entry));
    } else if (const auto* t = std::get_if<LinearShearFactor>(&f)) {
      Matrix m = Matrix::Identity(map.dim(), map.dim());
      m.row(t->row) += t->coeffs.transpose();
      Json entry;
      entry["matrix"] = matrix_to_json(m);
      factors.push_back(std::move(entry));
    } else {
      Json entry;
      entry["matrix"] = matrix_to_json(std::get<LinearFactor>(f).matrix());
      factors.push_back(std::move(entry));
    }
  }
  Json j;
  j["dim"] = map.dim();
  j["factors"] = std::move(factors);
  return j;
}

TameMap tame_map_from_json(const Json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    std::vector<TameFactor> factors;
    for (const Json& entry : j.at("factors")) {
      if (entry.contains("matrix")) {
        Matrix m = matrix_from_json(entry.at("matrix"), "tame map factor");
        // Recognize linear shears (identity plus one off-diagonal row) so a
        // reloaded map stays isotopy-ready.
        int shear_row = -1;
        bool is_shear = true;
        for (int r = 0; r < m.rows() && is_shear; ++r) {
          bool off = m(r, r) != 1.0;
          for (int c = 0; c < m.cols() && !off; ++c)
            if (c != r && m(r, c) != 0.0) off = true;
          if (off) {
            if (shear_row >= 0 || m(r, r) != 1.0) is_shear = false;
            else shear_row = r;
          }
        }
        if (is_shear && shear_row >= 0) {
          LinearShearFactor f;
          f.row = shear_row;
          f.coeffs = m.row(shear_row).transpose();
          f.coeffs[shear_row] = 0.0;
          factors.push_back(std::move(f));
        } else {
          factors.push_back(LinearFactor(std::move(m)));
        }
      } else {
        ShearFactor f{entry.at("axis").get<int>(), entry.at("sign").get<double>(),
                      entry.at("inputs").get<std::vector<int>>(),
                      SampledLipschitzFunction(point_cloud_from_json(entry.at("domain")),
                                               entry.at("values").get<std::vector<double>>(),
                                               entry.at("L").get<double>())};
        factors.push_back(std::move(f));
      }
    }
    return TameMap(std::move(factors), dim);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tame map: ") + e.what());
  }
}

Json to_json(const PuiseuxBranch& branch) {
  Json terms = Json::array();
  for (const PuiseuxTerm& t : branch.terms())
    terms.push_back(Json::array({t.exponent.num(), t.exponent.den(), t.coefficient}));
  Json j;
  j["terms"] = std::move(terms);
  j["axis"] = axis_name(branch.axis());
  return j;
}

PuiseuxBranch branch_from_json(const Json& j) {
  try {
    std::vector<PuiseuxTerm> terms;
    for (const Json& t : j.at("terms")) {
      if (!t.is_array() || t.size() != 3)
        throw ParseError("branch term must be [num, den, coeff]");
      terms.push_back(
          {Rational(t.at(0).get<long long>(), t.at(1).get<long long>()), t.at(2).get<double>()});
    }
    return PuiseuxBranch(std::move(terms), axis_from_name(j.at("axis").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("puiseux branch: ") + e.what());
  }
}

Json to_json(const GermCurve& curve) {
  Json branches = Json::array();
  for (const PuiseuxBranch& b : curve.branches()) branches.push_back(to_json(b));
  Json j;
  j["label"] = curve.label();
  j["branches"] = std::move(branches);
  return j;
}

GermCurve germ_curve_from_json(const Json& j) {
  try {
    std::vector<PuiseuxBranch> branches;
    for (const Json& b : j.at("branches")) branches.push_back(branch_from_json(b));
    return GermCurve(std::move(branches), j.value("label", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("germ curve: ") + e.what());
  }
}

namespace {

Json fn_to_json(const GermFnPtr& fn) {
  if (dynamic_cast<const ZeroFn*>(fn.get())) return Json{{"type", "zero"}};
  if (const auto* p = dynamic_cast<const PuiseuxFn*>(fn.get())) {
    Json j;
    j["type"] = "puiseux";
    j["branch"] = to_json(p->branch());
    return j;
  }
  if (const auto* d = dynamic_cast<const DiffFn*>(fn.get())) {
    Json j;
    j["type"] = "diff";
    j["a"] = fn_to_json(d->a());
    j["b"] = fn_to_json(d->b());
    return j;
  }
  if (const auto* c = dynamic_cast<const ChartBranchFn*>(fn.get())) {
    Json j;
    j["type"] = "chart_branch";
    j["branch"] = to_json(c->branch());
    Matrix m(2, 2);
    m = c->chart();
    j["chart"] = matrix_to_json(m);
    return j;
  }
  throw Error("fn_to_json: unknown germ function node");
}

GermFnPtr fn_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "zero") return make_zero_fn();
  if (type == "puiseux") return make_puiseux_fn(branch_from_json(j.at("branch")));
  if (type == "diff") return make_diff_fn(fn_from_json(j.at("a")), fn_from_json(j.at("b")));
  if (type == "chart_branch") {
    const Matrix m = matrix_from_json(j.at("chart"), "chart");
    Eigen::Matrix2d chart = m;
    return make_chart_branch_fn(branch_from_json(j.at("branch")), chart);
  }
  throw ParseError("fn_from_json: unknown node type '" + type + "'");
}

Json tx_to_json(const GermTransformPtr& tx) {
  if (const auto* s = dynamic_cast<const SeqTx*>(tx.get())) {
    Json stages = Json::array();
    for (const auto& stage : s->stages()) stages.push_back(tx_to_json(stage));
    Json j;
    j["type"] = "seq";
    j["stages"] = std::move(stages);
    return j;
  }
  if (const auto* s = dynamic_cast<const StraightenTx*>(tx.get())) {
    Json j;
    j["type"] = "straighten";
    j["alpha"] = rational_to_json(s->alpha());
    j["f"] = fn_to_json(s->f());
    return j;
  }
  if (const auto* s = dynamic_cast<const MonomialShiftTx*>(tx.get())) {
    Json j;
    j["type"] = "monomial_shift";
    j["alpha"] = rational_to_json(s->alpha());
    return j;
  }
  if (const auto* s = dynamic_cast<const LinearTx*>(tx.get())) {
    Json j;
    j["type"] = "linear";
    Matrix m(2, 2);
    m = s->matrix();
    j["matrix"] = matrix_to_json(m);
    return j;
  }
  if (const auto* s = dynamic_cast<const InverseTx*>(tx.get())) {
    Json j;
    j["type"] = "inverse";
    j["inner"] = tx_to_json(s->inner());
    return j;
  }
  throw Error("tx_to_json: unknown transform node");
}

GermTransformPtr tx_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "seq") {
    std::vector<GermTransformPtr> stages;
    for (const Json& s : j.at("stages")) stages.push_back(tx_from_json(s));
    return make_seq(std::move(stages));
  }
  if (type == "straighten")
    return make_straighten(fn_from_json(j.at("f")), rational_from_json(j.at("alpha")));
  if (type == "monomial_shift")
    return make_monomial_shift(rational_from_json(j.at("alpha")));
  if (type == "linear") {
    const Matrix m = matrix_from_json(j.at("matrix"), "linear transform");
    Eigen::Matrix2d m2 = m;
    return make_linear(m2);
  }
  if (type == "inverse") return make_inverse(tx_from_json(j.at("inner")));
  throw ParseError("tx_from_json: unknown node type '" + type + "'");
}

}  // namespace

Json to_json(const PiecewiseGermMap& map) {
  Json pieces = Json::array();
  for (const PiecewiseGermMap::Piece& piece : map.pieces()) {
    Json region;
    if (piece.region.kind == Region::Kind::quadrant) {
      region["type"] = "quadrant";
    } else {
      region["type"] = "sector";
      region["theta1"] = piece.region.theta1;
      region["theta2"] = piece.region.theta2;
    }
    Json entry;
    entry["region"] = std::move(region);
    entry["map"] = tx_to_json(piece.map);
    pieces.push_back(std::move(entry));
  }
  Json j;
  j["pieces"] = std::move(pieces);
  return j;
}

PiecewiseGermMap germ_map_from_json(const Json& j) {
  try {
    std::vector<PiecewiseGermMap::Piece> pieces;
    for (const Json& entry : j.at("pieces")) {
      Region region;
      const Json& rj = entry.at("region");
      if (rj.at("type").get<std::string>() == "quadrant") {
        region.kind = Region::Kind::quadrant;
      } else {
        region.kind = Region::Kind::sector;
        region.theta1 = rj.at("theta1").get<double>();
        region.theta2 = rj.at("theta2").get<double>();
      }
      pieces.push_back({region, tx_from_json(entry.at("map"))});
    }
    return PiecewiseGermMap(std::move(pieces));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("germ map: ") + e.what());
  }
}

Json to_json(const SplitCoordinates& split) {
  Json j;
  j["S"] = matrix_to_json(split.S);
  j["T"] = matrix_to_json(split.T);
  Json reports = Json::array();
  for (const DistortionReport& r : split.q_distortions) reports.push_back(to_json(r));
  j["q_distortions"] = std::move(reports);
  return j;
}

Json to_json(const ExtensionResult& result) {
  Json j;
  j["map"] = to_json(result.F);
  j["isotopy_ready"] = result.isotopy_ready;
  j["interpolation_error"] = result.interpolation_error;
  j["max_stage_drift"] = result.max_stage_drift;
  j["report"] = to_json(result.report);
  if (result.final_radius) j["final_radius"] = *result.final_radius;
  j["active_indices"] = result.active_indices;
  return j;
}

Json to_json(const CertificationReport& report) {
  Json j;
  j["interpolation_error"] = report.interpolation_error;
  j["interpolation_threshold"] = report.interpolation_threshold;
  j["interpolation_ok"] = report.interpolation_ok;
  j["worst_sample"] = report.worst_sample;
  j["inverse_roundtrip_max"] = report.inverse_roundtrip_max;
  j["inverse_ok"] = report.inverse_ok;
  j["map_distortion"] = to_json(report.map_distortion);
  j["sample_distortion"] = to_json(report.sample_distortion);
  j["distortion_consistent"] = report.distortion_consistent;
  j["isotopy_zero_is_identity"] = report.isotopy_zero_is_identity;
  j["isotopy_one_matches_eval"] = report.isotopy_one_matches_eval;
  j["pass"] = report.pass();
  return j;
}

std::vector<int> pairing_from_json(const Json& j, int expected_size) {
  try {
    std::vector<int> pairing = j.at("pairing").get<std::vector<int>>();
    if (static_cast<int>(pairing.size()) != expected_size)
      throw ParseError("pairing: expected " + std::to_string(expected_size) + " entries");
    return pairing;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("pairing: ") + e.what());
  }
}

}  // namespace lipembed
