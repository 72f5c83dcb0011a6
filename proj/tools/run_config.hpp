#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "stokes/spectrum.hpp"

namespace stokes::cli {

using json = nlohmann::ordered_json;

/// Everything that changes a run's numbers. Every report embeds it.
struct RunConfig {
  double hit_factor = 1e-6;        // delta_hit / D
  double clearance_factor = 1e-3;  // delta_path / diameter
  double angle_bracket = 1e-2;     // epsilon_t
  double quad_rel_tol = 1e-12;
  double escape_factor = 10.0;  // R_escape / (1 + max |root|)
  double length_factor = 50.0;  // L_max / D
  double trace_rtol = 1e-10;
  double root_tol = 1e-10;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::vector<std::string> formats{"json"};

  void validate() const {
    for (double v : {hit_factor, clearance_factor, angle_bracket, quad_rel_tol, escape_factor, length_factor,
                     trace_rtol, root_tol})
      if (!(v > 0.0)) throw Error(ErrorKind::Parse, "config tolerances must be positive");
    static const std::set<std::string> known{"json", "svg", "csv"};
    for (const auto& f : formats)
      if (!known.count(f)) throw Error(ErrorKind::Parse, "unknown output format '" + f + "'");
  }

  bool wants(const std::string& f) const { return std::find(formats.begin(), formats.end(), f) != formats.end(); }

  RootOptions roots() const { return {root_tol, 2000}; }

  TraceOptions trace() const {
    TraceOptions o;
    o.hit_factor = hit_factor;
    o.escape_factor = escape_factor;
    o.length_factor = length_factor;
    o.rtol = trace_rtol;
    return o;
  }

  PathOptions path() const {
    PathOptions o;
    o.clearance_factor = clearance_factor;
    o.rel_tol = quad_rel_tol;
    return o;
  }

  GeodesicOptions geodesics() const {
    GeodesicOptions o;
    o.trace = trace();
    o.path = path();
    o.initial_bracket = angle_bracket;
    return o;
  }

  SpectrumOptions spectrum() const {
    SpectrumOptions o;
    o.geodesics = geodesics();
    return o;
  }
};

inline json to_json(const RunConfig& c) {
  return json{{"hit_factor", c.hit_factor},
              {"clearance_factor", c.clearance_factor},
              {"angle_bracket", c.angle_bracket},
              {"quad_rel_tol", c.quad_rel_tol},
              {"escape_factor", c.escape_factor},
              {"length_factor", c.length_factor},
              {"trace_rtol", c.trace_rtol},
              {"root_tol", c.root_tol},
              {"seed", c.seed},
              {"out_dir", c.out_dir},
              {"formats", c.formats}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig config_from_json(const json& j, RunConfig c = {}) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "hit_factor") c.hit_factor = v.get<double>();
      else if (key == "clearance_factor") c.clearance_factor = v.get<double>();
      else if (key == "angle_bracket") c.angle_bracket = v.get<double>();
      else if (key == "quad_rel_tol") c.quad_rel_tol = v.get<double>();
      else if (key == "escape_factor") c.escape_factor = v.get<double>();
      else if (key == "length_factor") c.length_factor = v.get<double>();
      else if (key == "trace_rtol") c.trace_rtol = v.get<double>();
      else if (key == "root_tol") c.root_tol = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else if (key == "formats") c.formats = v.get<std::vector<std::string>>();
      else throw Error(ErrorKind::Parse, "unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, "config key '" + key + "': " + e.what());
    }
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace stokes::cli
