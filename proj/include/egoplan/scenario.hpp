#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "egoplan/config.hpp"
#include "egoplan/graph_search.hpp"

namespace egoplan {

enum class MapKind { kForest, kBoxes, kPoints, kRandom };

struct MapSpec {
  MapKind kind = MapKind::kForest;
  double density = 0.1;        ///< forest: pillars per square meter
  ForestParams forest;
  std::vector<Box> boxes;
  std::vector<Vec3> points;    ///< inline points, plus anything read from points_file
  std::string points_file;
  double probability = 0.2;    ///< random: per-cell occupancy probability
  double inflation = 0.2;      ///< meters
};

struct Scenario {
  std::uint64_t seed = 0;
  Box bounds{Vec3(0, 0, 0), Vec3(20, 20, 3)};
  double resolution = 0.1;
  MapSpec map;
  State start;
  Vec3 goal = Vec3::Zero();
  PlannerConfig config;
  FitWeights fit;
  SearchAlgorithm algorithm = SearchAlgorithm::kBidirectional;
  double control_spacing = 0.4;  ///< target distance between fitted waypoints, meters
};

/**
 * Parses a scenario document.
 *
 * Top level: seed, bounds {min, max}, resolution, map {type, ...}, start {pos,
 * vel, acc}, goal, limits {v_m, a_m, j_m}, weights {lambda_s, lambda_c,
 * lambda_d, lambda_f}, s_f, solver {...}, fit {...}. Only bounds, map, start and
 * goal are required. Unknown keys at any level throw InvalidInput, as do wrong
 * types and values rejected by the config validators. Relative `points_file`
 * paths resolve against `base_dir`.
 */
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes every field parse_scenario understands; round-trips exactly.
std::string scenario_to_json(const Scenario& scenario);

struct World {
  OccupancyGrid raw;
  OccupancyGrid inflated;
};

/// Builds the raw and inflated grids; throws InvalidInput when start or goal is blocked.
World build_world(const Scenario& scenario);

/// 20 m x 20 m x 3 m forest at 0.1 m, start (1, 10, 1.5), goal (19, 10, 1.5).
Scenario forest_scenario(std::uint64_t seed, double density);

}  // namespace egoplan
