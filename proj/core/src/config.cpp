#include "riisfsi/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "riisfsi/errors.hpp"

namespace riisfsi {

using nlohmann::json;

namespace {

// Reads keys from a JSON object and rejects the ones never read.
class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ParameterError("config: '" + where_ + "' must be an object");
  }
  template <typename T>
  void get(const char* key, T& value) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      value = it->get<T>();
    } catch (const json::exception& e) {
      throw ParameterError("config: bad value for '" + where_ + "." + key + "': " + e.what());
    }
  }
  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ParameterError("config: unknown key '" + where_ + "." + it.key() + "'");
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

json points_json(const std::vector<Eigen::Vector2d>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x(), p.y()});
  return a;
}

std::vector<Eigen::Vector2d> points_from(const json& a, const std::string& where) {
  if (!a.is_array()) throw ParameterError("config: '" + where + "' must be an array of points");
  std::vector<Eigen::Vector2d> out;
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ParameterError("config: '" + where + "' entries must be [x, y]");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

ValvePhase phase_from(const std::string& s) {
  for (ValvePhase p : {ValvePhase::closed, ValvePhase::opening, ValvePhase::open, ValvePhase::closing})
    if (s == to_string(p)) return p;
  throw ParameterError("config: unknown valve phase '" + s + "'");
}

json valve_json(const ValveSurface& v, bool with_geometry) {
  json j = {{"name", v.name},
            {"half_thickness", v.half_thickness},
            {"resistance", v.resistance},
            {"ramp_open", v.ramp_open},
            {"ramp_close", v.ramp_close},
            {"mode", v.mode == ValveMode::fixed ? "fixed" : "pressure_driven"},
            {"downstream_side", v.downstream_side},
            {"blend", v.controller.blend},
            {"phase", to_string(v.controller.phase)}};
  if (with_geometry) {
    j["closed_points"] = points_json(v.closed_points);
    j["open_points"] = points_json(v.open_points);
  }
  return j;
}

void valve_from(const json& j, ValveSurface& v, bool with_geometry, const std::string& where) {
  Reader r(j, where);
  r.get("name", v.name);
  r.get("half_thickness", v.half_thickness);
  r.get("resistance", v.resistance);
  r.get("ramp_open", v.ramp_open);
  r.get("ramp_close", v.ramp_close);
  std::string mode = v.mode == ValveMode::fixed ? "fixed" : "pressure_driven";
  r.get("mode", mode);
  if (mode == "fixed")
    v.mode = ValveMode::fixed;
  else if (mode == "pressure_driven")
    v.mode = ValveMode::pressure_driven;
  else
    throw ParameterError("config: unknown valve mode '" + mode + "'");
  r.get("downstream_side", v.downstream_side);
  r.get("blend", v.controller.blend);
  std::string phase = to_string(v.controller.phase);
  r.get("phase", phase);
  v.controller.phase = phase_from(phase);
  if (with_geometry) {
    if (const json* c = r.child("closed_points")) v.closed_points = points_from(*c, where + ".closed_points");
    if (const json* o = r.child("open_points"))
      v.open_points = points_from(*o, where + ".open_points");
    else
      v.open_points = v.closed_points;
  }
  r.finish();
}

json to_json(const SimConfig& c) {
  json valves = json::array();
  for (const auto& v : c.valves) valves.push_back(valve_json(v, true));
  return {
      {"geometry",
       {{"scenario", c.geometry.scenario},
        {"fluid_radius", c.geometry.fluid_radius},
        {"wall_thickness", c.geometry.wall_thickness},
        {"channel_length", c.geometry.channel_length},
        {"channel_height", c.geometry.channel_height},
        {"mesh_size", c.geometry.mesh_size},
        {"valve_penetration", c.geometry.valve_penetration}}},
      {"fluid",
       {{"density", c.fluid.density},
        {"viscosity", c.fluid.viscosity},
        {"stabilization", c.fluid.stabilization}}},
      {"solid",
       {{"density", c.solid.density},
        {"shear", c.solid.shear},
        {"bulk", c.solid.bulk},
        {"active_max", c.solid.active_max},
        {"active_period", c.solid.active_period}}},
      {"scenario_valve", c.scenario_valve},
      {"scenario_valve_params", valve_json(c.scenario_valve_params, false)},
      {"valves", valves},
      {"dt", c.dt},
      {"final_time", c.final_time},
      {"attachment_force", c.attachment_force ? "on" : "off"},
      {"inlet_pressure", c.inlet_pressure},
      {"outlet_pressure", c.outlet_pressure},
      {"clamp_exterior", c.clamp_exterior},
      {"v_min", c.v_min},
      {"newton",
       {{"abs_tol", c.newton.abs_tol},
        {"rel_tol", c.newton.rel_tol},
        {"max_iter", c.newton.max_iter}}},
      {"delta_subdivision", c.delta_subdivision},
      {"output_dir", c.output_dir},
      {"snapshot_every", c.snapshot_every},
      {"diagnostic_every", c.diagnostic_every},
      {"convergence_dts", c.convergence_dts},
  };
}

SimConfig from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("config: top level must be an object");
  std::string scenario = "annulus";
  if (auto g = j.find("geometry"); g != j.end() && g->is_object() && g->contains("scenario"))
    scenario = (*g)["scenario"].get<std::string>();
  SimConfig c = default_config(scenario);

  Reader r(j, "config");
  if (const json* g = r.child("geometry")) {
    Reader rg(*g, "geometry");
    rg.get("scenario", c.geometry.scenario);
    rg.get("fluid_radius", c.geometry.fluid_radius);
    rg.get("wall_thickness", c.geometry.wall_thickness);
    rg.get("channel_length", c.geometry.channel_length);
    rg.get("channel_height", c.geometry.channel_height);
    rg.get("mesh_size", c.geometry.mesh_size);
    rg.get("valve_penetration", c.geometry.valve_penetration);
    rg.finish();
  }
  if (const json* f = r.child("fluid")) {
    Reader rf(*f, "fluid");
    rf.get("density", c.fluid.density);
    rf.get("viscosity", c.fluid.viscosity);
    rf.get("stabilization", c.fluid.stabilization);
    rf.finish();
  }
  if (const json* s = r.child("solid")) {
    Reader rs(*s, "solid");
    rs.get("density", c.solid.density);
    rs.get("shear", c.solid.shear);
    rs.get("bulk", c.solid.bulk);
    rs.get("active_max", c.solid.active_max);
    rs.get("active_period", c.solid.active_period);
    rs.finish();
  }
  r.get("scenario_valve", c.scenario_valve);
  if (const json* v = r.child("scenario_valve_params"))
    valve_from(*v, c.scenario_valve_params, false, "scenario_valve_params");
  if (const json* vs = r.child("valves")) {
    if (!vs->is_array()) throw ParameterError("config: 'valves' must be an array");
    c.valves.clear();
    for (std::size_t k = 0; k < vs->size(); ++k) {
      ValveSurface v;
      valve_from((*vs)[k], v, true, "valves[" + std::to_string(k) + "]");
      c.valves.push_back(std::move(v));
    }
  }
  r.get("dt", c.dt);
  r.get("final_time", c.final_time);
  std::string attach = c.attachment_force ? "on" : "off";
  r.get("attachment_force", attach);
  if (attach != "on" && attach != "off")
    throw ParameterError("config: attachment_force must be \"on\" or \"off\"");
  c.attachment_force = attach == "on";
  r.get("inlet_pressure", c.inlet_pressure);
  r.get("outlet_pressure", c.outlet_pressure);
  r.get("clamp_exterior", c.clamp_exterior);
  r.get("v_min", c.v_min);
  if (const json* n = r.child("newton")) {
    Reader rn(*n, "newton");
    rn.get("abs_tol", c.newton.abs_tol);
    rn.get("rel_tol", c.newton.rel_tol);
    rn.get("max_iter", c.newton.max_iter);
    rn.finish();
  }
  r.get("delta_subdivision", c.delta_subdivision);
  r.get("output_dir", c.output_dir);
  r.get("snapshot_every", c.snapshot_every);
  r.get("diagnostic_every", c.diagnostic_every);
  r.get("convergence_dts", c.convergence_dts);
  r.finish();
  return c;
}

}  // namespace

SimConfig default_config(const std::string& scenario) {
  SimConfig c;
  c.geometry.scenario = scenario;
  if (scenario == "annulus") return c;
  if (scenario == "channel") {
    c.solid.shear = 5e5;
    c.solid.bulk = 5e6;
    c.solid.active_max = 0.0;
    c.clamp_exterior = true;
    c.inlet_pressure = 100.0;
    c.final_time = 0.03;
    c.scenario_valve_params.downstream_side = -1;
    return c;
  }
  throw ParameterError("unknown scenario '" + scenario + "'");
}

void check_config(const SimConfig& c) {
  const auto& g = c.geometry;
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (g.scenario != "annulus" && g.scenario != "channel")
    throw ParameterError("unknown scenario '" + g.scenario + "'");
  if (!positive(g.mesh_size)) throw ParameterError("mesh_size must be positive");
  if (!positive(g.fluid_radius) || !positive(g.wall_thickness) || !positive(g.channel_length) ||
      !positive(g.channel_height))
    throw ParameterError("geometry dimensions must be positive");
  if (!(g.valve_penetration >= 0.0 && g.valve_penetration < g.wall_thickness))
    throw ParameterError("valve_penetration must lie in [0, wall_thickness)");
  check_params(c.fluid);
  check_params(c.solid);
  if (!positive(c.dt)) throw ParameterError("dt must be positive");
  if (!(std::isfinite(c.final_time) && c.final_time >= 0.0))
    throw ParameterError("final_time must be non-negative");
  if (!positive(c.v_min)) throw ParameterError("v_min must be positive");
  if (!positive(c.newton.abs_tol) || !positive(c.newton.rel_tol) || c.newton.max_iter < 1)
    throw ParameterError("Newton tolerances must be positive and max_iter >= 1");
  if (c.delta_subdivision < 0 || c.delta_subdivision > 4)
    throw ParameterError("delta_subdivision must be in [0, 4]");
  if (c.snapshot_every < 0) throw ParameterError("snapshot_every must be >= 0");
  if (c.diagnostic_every < 1) throw ParameterError("diagnostic_every must be >= 1");
  if (!std::isfinite(c.inlet_pressure) || !std::isfinite(c.outlet_pressure))
    throw ParameterError("boundary pressures must be finite");
  for (double dt : c.convergence_dts)
    if (!positive(dt)) throw ParameterError("convergence_dts entries must be positive");
  for (const auto& v : resolve_valves(c)) check_valve(v);
}

std::vector<ValveSurface> resolve_valves(const SimConfig& c) {
  std::vector<ValveSurface> out;
  if (c.scenario_valve) {
    const auto& g = c.geometry;
    Eigen::Vector2d a, b;
    if (g.scenario == "annulus") {
      const double r = g.fluid_radius + g.valve_penetration;
      a = {-r, 0.0};
      b = {r, 0.0};
    } else {
      a = {0.5 * g.channel_length, -g.valve_penetration};
      b = {0.5 * g.channel_length, g.channel_height + g.valve_penetration};
    }
    const int segments = std::max(2, static_cast<int>(std::ceil((b - a).norm() / g.mesh_size)));
    ValveSurface v = make_straight_valve(c.scenario_valve_params.name, a, b, segments);
    const std::vector<Eigen::Vector2d> pts = v.closed_points;
    v = c.scenario_valve_params;
    v.closed_points = pts;
    v.open_points = pts;
    out.push_back(std::move(v));
  }
  for (const auto& v : c.valves) out.push_back(v);
  return out;
}

std::string serialize(const SimConfig& config) { return to_json(config).dump(2) + "\n"; }

SimConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const SimConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file '" + path + "'");
  out << serialize(config);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::uint64_t config_digest(const SimConfig& config) {
  const std::string s = to_json(config).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << digest;
  return os.str();
}

}  // namespace riisfsi
