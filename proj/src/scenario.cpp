#include "egoplan/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace egoplan {

using nlohmann::json;

namespace {

void only_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw InvalidInput(std::string(where) + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto allowed : keys) known = known || k == allowed;
    if (!known) throw InvalidInput("unknown field '" + k + "' in " + std::string(where));
  }
}

double number(const json& j, std::string_view what) {
  if (!j.is_number()) throw InvalidInput(std::string(what) + " must be a number");
  return j.get<double>();
}

int integer(const json& j, std::string_view what) {
  if (!j.is_number_integer()) throw InvalidInput(std::string(what) + " must be an integer");
  return j.get<int>();
}

Vec3 vec3(const json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 3) throw InvalidInput(std::string(what) + " must be [x, y, z]");
  Vec3 v(number(j[0], what), number(j[1], what), number(j[2], what));
  if (!v.allFinite()) throw InvalidInput(std::string(what) + " must be finite");
  return v;
}

Box box(const json& j, std::string_view what) {
  only_keys(j, what, {"min", "max"});
  if (!j.contains("min") || !j.contains("max")) throw InvalidInput(std::string(what) + " needs min and max");
  Box b{vec3(j["min"], what), vec3(j["max"], what)};
  if (!((b.max - b.min).array() > 0).all()) throw InvalidInput(std::string(what) + " is degenerate");
  return b;
}

template <typename T>
void maybe(const json& j, const char* key, T& out, T (*read)(const json&, std::string_view)) {
  if (j.contains(key)) out = read(j[key], key);
}

MapSpec parse_map(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw InvalidInput("map needs a string 'type'");
  MapSpec m;
  const std::string type = j["type"];
  maybe(j, "inflation", m.inflation, number);
  if (type == "forest") {
    only_keys(j, "map", {"type", "inflation", "density", "radius_min", "radius_max", "keep_clear"});
    m.kind = MapKind::kForest;
    maybe(j, "density", m.density, number);
    maybe(j, "radius_min", m.forest.radius_min, number);
    maybe(j, "radius_max", m.forest.radius_max, number);
    maybe(j, "keep_clear", m.forest.keep_clear_margin, number);
    if (m.density < 0 || m.forest.radius_min <= 0 || m.forest.radius_max < m.forest.radius_min)
      throw InvalidInput("forest needs density >= 0 and 0 < radius_min <= radius_max");
  } else if (type == "boxes") {
    only_keys(j, "map", {"type", "inflation", "boxes"});
    m.kind = MapKind::kBoxes;
    if (!j.contains("boxes") || !j["boxes"].is_array()) throw InvalidInput("boxes map needs 'boxes'");
    for (const auto& b : j["boxes"]) m.boxes.push_back(box(b, "boxes[]"));
  } else if (type == "points") {
    only_keys(j, "map", {"type", "inflation", "points", "file"});
    m.kind = MapKind::kPoints;
    if (j.contains("points")) {
      if (!j["points"].is_array()) throw InvalidInput("points must be a list");
      for (const auto& p : j["points"]) m.points.push_back(vec3(p, "points[]"));
    }
    if (j.contains("file")) {
      if (!j["file"].is_string()) throw InvalidInput("file must be a string");
      std::filesystem::path f = j["file"].get<std::string>();
      m.points_file = f.string();
      if (f.is_relative() && !base_dir.empty()) f = base_dir / f;
      for (const auto& p : read_xyz(f.string())) m.points.push_back(p);
    }
  } else if (type == "random") {
    only_keys(j, "map", {"type", "inflation", "probability"});
    m.kind = MapKind::kRandom;
    maybe(j, "probability", m.probability, number);
    if (m.probability < 0 || m.probability > 1) throw InvalidInput("probability must lie in [0, 1]");
  } else {
    throw InvalidInput("unknown map type '" + type + "'");
  }
  if (m.inflation < 0) throw InvalidInput("inflation must be non-negative");
  return m;
}

void parse_solver(const json& j, Scenario& s) {
  only_keys(j, "solver",
            {"max_iterations", "grad_tolerance", "objective_tolerance", "stall_window", "memory",
             "max_anchor_rounds", "penalty_growth", "clearance_tolerance", "max_lambda_c", "algorithm",
             "control_spacing", "lambda_e", "c_j_factor", "max_anchors_per_point"});
  auto& sv = s.config.solver;
  maybe(j, "max_iterations", sv.max_iterations, integer);
  maybe(j, "grad_tolerance", sv.grad_tolerance, number);
  maybe(j, "objective_tolerance", sv.objective_tolerance, number);
  maybe(j, "stall_window", sv.stall_window, integer);
  maybe(j, "memory", sv.memory, integer);
  maybe(j, "max_anchor_rounds", sv.max_anchor_rounds, integer);
  maybe(j, "penalty_growth", sv.penalty_growth, number);
  maybe(j, "clearance_tolerance", sv.clearance_tolerance, number);
  maybe(j, "max_lambda_c", sv.max_lambda_c, number);
  maybe(j, "control_spacing", s.control_spacing, number);
  maybe(j, "lambda_e", s.config.lambda_e, number);
  maybe(j, "c_j_factor", s.config.c_j_factor, number);
  maybe(j, "max_anchors_per_point", s.config.max_anchors_per_point, integer);
  if (j.contains("algorithm")) {
    if (!j["algorithm"].is_string()) throw InvalidInput("algorithm must be a string");
    try {
      s.algorithm = parse_algorithm(j["algorithm"].get<std::string>());
    } catch (const Error& e) {
      throw InvalidInput(e.what());
    }
  }
  if (!(s.control_spacing > 0)) throw InvalidInput("control_spacing must be positive");
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json box_json(const Box& b) { return {{"min", vec_json(b.min)}, {"max", vec_json(b.max)}}; }

}  // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("scenario is not valid JSON: ") + e.what());
  }
  only_keys(j, "scenario",
            {"seed", "bounds", "resolution", "map", "start", "goal", "limits", "weights", "s_f",
             "solver", "fit"});
  for (const char* key : {"bounds", "map", "start", "goal"}) {
    if (!j.contains(key)) throw InvalidInput(std::string("scenario is missing '") + key + "'");
  }
  Scenario s;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw InvalidInput("seed must be a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  s.bounds = box(j["bounds"], "bounds");
  maybe(j, "resolution", s.resolution, number);
  if (!(s.resolution > 0)) throw InvalidInput("resolution must be positive");
  s.map = parse_map(j["map"], base_dir);

  const json& st = j["start"];
  only_keys(st, "start", {"pos", "vel", "acc"});
  if (!st.contains("pos")) throw InvalidInput("start needs 'pos'");
  s.start.pos = vec3(st["pos"], "start.pos");
  maybe(st, "vel", s.start.vel, vec3);
  maybe(st, "acc", s.start.acc, vec3);
  s.goal = vec3(j["goal"], "goal");

  if (j.contains("limits")) {
    const json& l = j["limits"];
    only_keys(l, "limits", {"v_m", "a_m", "j_m"});
    maybe(l, "v_m", s.config.v_m, number);
    maybe(l, "a_m", s.config.a_m, number);
    maybe(l, "j_m", s.config.j_m, number);
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    only_keys(w, "weights", {"lambda_s", "lambda_c", "lambda_d", "lambda_f"});
    maybe(w, "lambda_s", s.config.lambda_s, number);
    maybe(w, "lambda_c", s.config.lambda_c, number);
    maybe(w, "lambda_d", s.config.lambda_d, number);
    maybe(w, "lambda_f", s.config.lambda_f, number);
  }
  maybe(j, "s_f", s.config.s_f, number);
  if (j.contains("solver")) parse_solver(j["solver"], s);
  if (j.contains("fit")) {
    const json& f = j["fit"];
    only_keys(f, "fit", {"w_a", "w_r", "samples"});
    maybe(f, "w_a", s.fit.w_a, number);
    maybe(f, "w_r", s.fit.w_r, number);
    maybe(f, "samples", s.fit.samples, integer);
  }
  try {
    s.config.validate();
    s.fit.validate();
  } catch (const PreconditionError& e) {
    throw InvalidInput(e.what());
  }
  if (!s.bounds.contains(s.start.pos) || !s.bounds.contains(s.goal))
    throw InvalidInput("start and goal must lie inside bounds");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["seed"] = s.seed;
  j["bounds"] = box_json(s.bounds);
  j["resolution"] = s.resolution;
  json m;
  m["inflation"] = s.map.inflation;
  switch (s.map.kind) {
    case MapKind::kForest:
      m["type"] = "forest";
      m["density"] = s.map.density;
      m["radius_min"] = s.map.forest.radius_min;
      m["radius_max"] = s.map.forest.radius_max;
      m["keep_clear"] = s.map.forest.keep_clear_margin;
      break;
    case MapKind::kBoxes:
      m["type"] = "boxes";
      m["boxes"] = json::array();
      for (const auto& b : s.map.boxes) m["boxes"].push_back(box_json(b));
      break;
    case MapKind::kPoints:
      m["type"] = "points";
      m["points"] = json::array();
      for (const auto& p : s.map.points) m["points"].push_back(vec_json(p));
      break;
    case MapKind::kRandom:
      m["type"] = "random";
      m["probability"] = s.map.probability;
      break;
  }
  j["map"] = m;
  j["start"] = {{"pos", vec_json(s.start.pos)}, {"vel", vec_json(s.start.vel)}, {"acc", vec_json(s.start.acc)}};
  j["goal"] = vec_json(s.goal);
  j["limits"] = {{"v_m", s.config.v_m}, {"a_m", s.config.a_m}, {"j_m", s.config.j_m}};
  j["weights"] = {{"lambda_s", s.config.lambda_s}, {"lambda_c", s.config.lambda_c},
                  {"lambda_d", s.config.lambda_d}, {"lambda_f", s.config.lambda_f}};
  j["s_f"] = s.config.s_f;
  const auto& sv = s.config.solver;
  j["solver"] = {{"max_iterations", sv.max_iterations},
                 {"grad_tolerance", sv.grad_tolerance},
                 {"objective_tolerance", sv.objective_tolerance},
                 {"stall_window", sv.stall_window},
                 {"memory", sv.memory},
                 {"max_anchor_rounds", sv.max_anchor_rounds},
                 {"penalty_growth", sv.penalty_growth},
                 {"clearance_tolerance", sv.clearance_tolerance},
                 {"max_lambda_c", sv.max_lambda_c},
                 {"algorithm", std::string(to_string(s.algorithm))},
                 {"control_spacing", s.control_spacing},
                 {"lambda_e", s.config.lambda_e},
                 {"c_j_factor", s.config.c_j_factor},
                 {"max_anchors_per_point", s.config.max_anchors_per_point}};
  j["fit"] = {{"w_a", s.fit.w_a}, {"w_r", s.fit.w_r}, {"samples", s.fit.samples}};
  return j.dump(2);
}

World build_world(const Scenario& s) {
  World w;
  const Vec3 keep[] = {s.start.pos, s.goal};
  switch (s.map.kind) {
    case MapKind::kForest:
      w.raw = random_forest(s.seed, s.map.density, s.bounds, s.resolution, keep, s.map.forest);
      break;
    case MapKind::kBoxes:
      w.raw = rasterize_boxes(s.map.boxes, s.bounds, s.resolution);
      break;
    case MapKind::kPoints:
      w.raw = build_grid(s.map.points, s.resolution, s.bounds);
      break;
    case MapKind::kRandom: {
      w.raw = random_cells(s.seed, s.map.probability, s.bounds, s.resolution);
      // Start and goal cells are carved out so the instance stays well-formed.
      w.raw.set_occupied(w.raw.world_to_cell(s.start.pos), false);
      w.raw.set_occupied(w.raw.world_to_cell(s.goal), false);
      break;
    }
  }
  w.inflated = inflate(w.raw, s.map.inflation);
  if (s.map.kind == MapKind::kRandom) {
    w.inflated.set_occupied(w.inflated.world_to_cell(s.start.pos), false);
    w.inflated.set_occupied(w.inflated.world_to_cell(s.goal), false);
  }
  if (w.inflated.occupied(s.start.pos)) throw InvalidInput("start lies in an occupied cell");
  if (w.inflated.occupied(s.goal)) throw InvalidInput("goal lies in an occupied cell");
  return w;
}

Scenario forest_scenario(std::uint64_t seed, double density) {
  Scenario s;
  s.seed = seed;
  s.bounds = Box{Vec3(0, 0, 0), Vec3(20, 20, 3)};
  s.resolution = 0.1;
  s.map.kind = MapKind::kForest;
  s.map.density = density;
  s.start.pos = Vec3(1, 10, 1.5);
  s.goal = Vec3(19, 10, 1.5);
  return s;
}

}  // namespace egoplan
