#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "lipembed/json_io.hpp"
#include "lipembed/random.hpp"

namespace {

using lipembed::Json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string out;
  bool emit_plot_data = false;
};

Json config_json(const std::string& command, const GlobalOptions& opts,
                 const Json& inputs) {
  Json config;
  config["command"] = command;
  config["inputs"] = inputs;
  config["seed"] = opts.seed;
  config["tol"] = opts.tol;
  config["out"] = opts.out;
  config["emit_plot_data"] = opts.emit_plot_data;
  const char* threads = std::getenv("LIPEMBED_THREADS");
  config["threads"] = threads ? std::atoi(threads) : 1;
  return config;
}

void write_result(const GlobalOptions& opts, const std::string& command, Json inputs,
                  Json result) {
  Json envelope;
  envelope["config"] = config_json(command, opts, inputs);
  envelope["result"] = std::move(result);
  const std::string text = lipembed::dump_json(envelope);
  if (opts.out.empty()) {
    std::cout << text;
  } else {
    lipembed::write_text_file(opts.out, text);
  }
}

void write_csv(const GlobalOptions& opts, const std::string& header,
               const std::vector<std::pair<double, double>>& rows) {
  if (opts.out.empty()) return;
  std::string csv = header + "\n";
  char buf[80];
  for (const auto& [a, b] : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", a, b);
    csv += buf;
  }
  lipembed::write_text_file(opts.out + ".csv", csv);
}

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> schedule;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    schedule.push_back(std::stod(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return schedule;
}

// Accepts a bare map object, or an output envelope wrapping one.
Json unwrap_map(const Json& j) {
  if (j.contains("factors") || j.contains("pieces")) return j;
  if (j.contains("result")) return unwrap_map(j.at("result"));
  if (j.contains("map")) return unwrap_map(j.at("map"));
  throw lipembed::ParseError("no map found in file");
}

lipembed::SampledMap load_sampled_map(const std::string& source_path,
                                      const std::string& target_path,
                                      const std::string& pairing_path) {
  lipembed::PointCloud source =
      lipembed::point_cloud_from_json(lipembed::read_json_file(source_path));
  lipembed::PointCloud target =
      lipembed::point_cloud_from_json(lipembed::read_json_file(target_path));
  if (pairing_path.empty())
    return lipembed::SampledMap::identity_pairing(std::move(source), std::move(target));
  std::vector<int> pairing = lipembed::pairing_from_json(
      lipembed::read_json_file(pairing_path), source.size());
  return lipembed::SampledMap(std::move(source), std::move(target), std::move(pairing));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constructive bi-Lipschitz embeddings, tame extensions and plane "
               "curve-germ equivalences on finite samples"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions opts;
  app.add_option("--seed", opts.seed, "random seed (default 0)");
  app.add_option("--tol", opts.tol, "tolerance recorded with results (default 1e-8)");
  app.add_option("--out", opts.out, "output file (stdout when omitted)");
  app.add_flag("--emit-plot-data", opts.emit_plot_data,
               "also write a CSV series next to --out");

  // embed
  auto* embed = app.add_subcommand("embed", "reduce a cloud to a lower ambient dimension");
  std::string embed_input, embed_schedule;
  int embed_target = 0;
  bool embed_local = false, embed_global = false;
  embed->add_option("--input", embed_input, "point cloud JSON")->required();
  embed->add_option("--target-dim", embed_target, "target ambient dimension")->required();
  embed->add_flag("--local", embed_local, "germ-local reduction");
  embed->add_flag("--global", embed_global, "global reduction (default)");
  embed->add_option("--radius-schedule", embed_schedule,
                    "comma-separated decreasing radii (local mode)");

  // extend
  auto* extend = app.add_subcommand("extend", "extend a sampled embedding to a tame map");
  std::string ext_source, ext_target, ext_pairing, ext_mode = "sa", ext_schedule;
  bool ext_local = false;
  int ext_k = -1;
  extend->add_option("--source", ext_source, "source cloud JSON")->required();
  extend->add_option("--target", ext_target, "target cloud JSON")->required();
  extend->add_option("--pairing", ext_pairing, "pairing JSON (identity when omitted)");
  extend->add_option("--mode", ext_mode, "sa | plain (default sa)");
  extend->add_flag("--local", ext_local, "germ-local extension");
  extend->add_option("--k", ext_k, "intrinsic dimension (default: source cloud's)");
  extend->add_option("--radius-schedule", ext_schedule,
                     "comma-separated decreasing radii (local mode)");

  // germ-equiv
  auto* germ = app.add_subcommand("germ-equiv",
                                  "ambient equivalence of plane curve germs");
  std::string germ_x, germ_y;
  germ->add_option("--x", germ_x, "first germ JSON")->required();
  germ->add_option("--y", germ_y, "second germ JSON")->required();

  // apply
  auto* apply = app.add_subcommand("apply", "evaluate a stored map on points");
  std::string apply_map, apply_points;
  double apply_t = 1.0;
  bool apply_inverse = false;
  apply->add_option("--map", apply_map, "map JSON (tame or germ)")->required();
  apply->add_option("--points", apply_points, "point cloud JSON")->required();
  apply->add_option("--t", apply_t, "isotopy parameter in [0,1] (tame maps)");
  apply->add_flag("--inverse", apply_inverse, "apply the inverse map");

  // verify
  auto* verify = app.add_subcommand("verify", "independent verification oracles");
  std::string what, v_input, v_a, v_b, v_map, v_source, v_target, v_pairing, v_grid;
  double v_rho = 0.0;
  verify->add_option("--what", what, "lne | hausdorff | extension")->required();
  verify->add_option("--input", v_input, "cloud JSON (lne)");
  verify->add_option("--rho", v_rho, "connection radius (lne; default 3x spacing)");
  verify->add_option("--a", v_a, "first cloud (hausdorff)");
  verify->add_option("--b", v_b, "second cloud (hausdorff)");
  verify->add_option("--map", v_map, "tame map JSON (extension)");
  verify->add_option("--source", v_source, "source cloud (extension)");
  verify->add_option("--target", v_target, "target cloud (extension)");
  verify->add_option("--pairing", v_pairing, "pairing JSON (extension)");
  verify->add_option("--grid", v_grid, "lo,hi,steps for the inverse grid (extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*embed) {
      if (embed_local && embed_global)
        throw lipembed::ParseError("embed: --local and --global are exclusive");
      lipembed::PointCloud cloud =
          lipembed::point_cloud_from_json(lipembed::read_json_file(embed_input));
      lipembed::ReductionResult result =
          embed_local
              ? lipembed::germ_whitney_reduce(
                    cloud, false, embed_target,
                    embed_schedule.empty() ? std::vector<double>{}
                                           : parse_schedule(embed_schedule),
                    opts.seed)
              : lipembed::whitney_reduce(cloud, embed_target, opts.seed);
      Json inputs;
      inputs["input"] = embed_input;
      inputs["target_dim"] = embed_target;
      inputs["local"] = embed_local;
      if (!embed_schedule.empty()) inputs["radius_schedule"] = embed_schedule;
      write_result(opts, "embed", std::move(inputs), lipembed::to_json(result));
    } else if (*extend) {
      lipembed::SampledMap f = load_sampled_map(ext_source, ext_target, ext_pairing);
      const int k = ext_k >= 0 ? ext_k : f.source().intrinsic_dim();
      lipembed::ExtensionResult result;
      if (ext_local) {
        result = lipembed::extend_embedding_local(
            f, k,
            ext_schedule.empty() ? std::vector<double>{} : parse_schedule(ext_schedule),
            opts.seed);
      } else {
        if (ext_mode != "sa" && ext_mode != "plain")
          throw lipembed::ParseError("extend: --mode must be sa or plain");
        result = lipembed::extend_embedding(f, k,
                                            ext_mode == "sa"
                                                ? lipembed::ExtensionMode::semialgebraic
                                                : lipembed::ExtensionMode::plain,
                                            opts.seed);
      }
      Json inputs;
      inputs["source"] = ext_source;
      inputs["target"] = ext_target;
      if (!ext_pairing.empty()) inputs["pairing"] = ext_pairing;
      inputs["mode"] = ext_mode;
      inputs["local"] = ext_local;
      inputs["k"] = k;
      write_result(opts, "extend", std::move(inputs), lipembed::to_json(result));
      if (opts.emit_plot_data) {
        const lipembed::TameMap flat = result.F.decomposed();
        std::vector<std::pair<double, double>> rows;
        for (int step = 0; step <= 20; ++step) {
          const double t = step / 20.0;
          double sup = 0.0;
          for (int idx : result.active_indices) {
            const lipembed::Vector x = f.source().point(idx);
            sup = std::max(sup, (lipembed::isotopy_eval(flat, t, x) - x).norm());
          }
          rows.push_back({t, sup});
        }
        write_csv(opts, "t,sup_motion", rows);
      }
    } else if (*germ) {
      lipembed::GermCurve x =
          lipembed::germ_curve_from_json(lipembed::read_json_file(germ_x));
      lipembed::GermCurve y =
          lipembed::germ_curve_from_json(lipembed::read_json_file(germ_y));
      lipembed::GermEquivalenceResult result = lipembed::ambient_curve_equivalence(x, y);
      Json payload;
      payload["map"] = lipembed::to_json(result.map);
      payload["sigma"] = result.sigma;
      Json haus = Json::array();
      for (const auto& [r, h] : result.sphere_hausdorff)
        haus.push_back(Json::array({r, h}));
      payload["sphere_hausdorff"] = std::move(haus);
      Json inputs;
      inputs["x"] = germ_x;
      inputs["y"] = germ_y;
      write_result(opts, "germ-equiv", std::move(inputs), std::move(payload));
      if (opts.emit_plot_data) {
        std::vector<std::pair<double, double>> rows;
        for (const auto& [r, h] : result.sphere_hausdorff) rows.push_back({r, h / r});
        write_csv(opts, "r,hausdorff_over_r", rows);
      }
    } else if (*apply) {
      const Json map_json = unwrap_map(lipembed::read_json_file(apply_map));
      lipembed::PointCloud points =
          lipembed::point_cloud_from_json(lipembed::read_json_file(apply_points));
      Json out_points = Json::array();
      if (map_json.contains("factors")) {
        lipembed::TameMap map = lipembed::tame_map_from_json(map_json);
        const bool isotopy = apply->count("--t") > 0;
        if (isotopy && apply_inverse)
          throw lipembed::PreconditionError("apply: --t and --inverse are exclusive");
        lipembed::TameMap flat = isotopy ? map.decomposed() : lipembed::TameMap({}, 0);
        for (int i = 0; i < points.size(); ++i) {
          lipembed::Vector q =
              isotopy ? lipembed::isotopy_eval(flat, apply_t, points.point(i))
                      : (apply_inverse ? map.invert(points.point(i))
                                       : map(points.point(i)));
          Json row = Json::array();
          for (int c = 0; c < q.size(); ++c) row.push_back(q[c]);
          out_points.push_back(std::move(row));
        }
      } else {
        if (apply->count("--t") > 0)
          throw lipembed::PreconditionError("apply: --t applies to tame maps only");
        lipembed::PiecewiseGermMap map = lipembed::germ_map_from_json(map_json);
        for (int i = 0; i < points.size(); ++i) {
          if (points.ambient_dim() != 2)
            throw lipembed::PreconditionError("apply: germ maps act on the plane");
          const Eigen::Vector2d p(points.points()(i, 0), points.points()(i, 1));
          const Eigen::Vector2d q = apply_inverse ? map.apply_inverse(p) : map.apply(p);
          out_points.push_back(Json::array({q.x(), q.y()}));
        }
      }
      Json payload;
      payload["points"] = std::move(out_points);
      Json inputs;
      inputs["map"] = apply_map;
      inputs["points"] = apply_points;
      inputs["inverse"] = apply_inverse;
      if (apply->count("--t") > 0) inputs["t"] = apply_t;
      write_result(opts, "apply", std::move(inputs), std::move(payload));
    } else if (*verify) {
      Json payload;
      if (what == "lne") {
        if (v_input.empty()) throw lipembed::ParseError("verify lne: --input required");
        lipembed::PointCloud cloud =
            lipembed::point_cloud_from_json(lipembed::read_json_file(v_input));
        const double rho = v_rho > 0.0 ? v_rho : lipembed::default_rho(cloud);
        payload["rho"] = rho;
        payload["ratio"] = lipembed::lne_ratio(cloud, rho);
      } else if (what == "hausdorff") {
        if (v_a.empty() || v_b.empty())
          throw lipembed::ParseError("verify hausdorff: --a and --b required");
        payload["distance"] = lipembed::hausdorff(
            lipembed::point_cloud_from_json(lipembed::read_json_file(v_a)),
            lipembed::point_cloud_from_json(lipembed::read_json_file(v_b)));
      } else if (what == "extension") {
        if (v_map.empty() || v_source.empty() || v_target.empty())
          throw lipembed::ParseError(
              "verify extension: --map, --source and --target required");
        lipembed::TameMap map =
            lipembed::tame_map_from_json(unwrap_map(lipembed::read_json_file(v_map)));
        lipembed::SampledMap f = load_sampled_map(v_source, v_target, v_pairing);
        lipembed::GridSpec grid;
        if (!v_grid.empty()) {
          const std::vector<double> parts = parse_schedule(v_grid);
          if (parts.size() != 3) throw lipembed::ParseError("verify: --grid is lo,hi,steps");
          grid.lo = parts[0];
          grid.hi = parts[1];
          grid.steps = static_cast<int>(parts[2]);
        }
        payload = lipembed::to_json(lipembed::certify_extension(map, f, grid));
      } else {
        throw lipembed::ParseError("verify: --what must be lne, hausdorff or extension");
      }
      Json inputs;
      inputs["what"] = what;
      for (const auto& [key, value] :
           std::initializer_list<std::pair<const char*, const std::string*>>{
               {"input", &v_input}, {"a", &v_a},       {"b", &v_b},
               {"map", &v_map},     {"source", &v_source}, {"target", &v_target},
               {"pairing", &v_pairing}, {"grid", &v_grid}})
        if (!value->empty()) inputs[key] = *value;
      write_result(opts, "verify", std::move(inputs), std::move(payload));
    }
    return 0;
  } catch (const lipembed::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const lipembed::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lipembed::SearchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const lipembed::NotEquivalentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
