#pragma once

#include <vector>

#include "egoplan/planner.hpp"

namespace egoplan {

struct SimOptions {
  double sensing_radius = 5.0;   ///< meters
  double replan_period = 1.0;    ///< seconds
  double horizon = 7.5;          ///< local target distance along the guide, meters
  double step = 0.05;            ///< simulation step, seconds
  double timeout = 0.0;          ///< <= 0 means 3 * |goal - start| / v_m + 20 s
  double goal_tolerance = 0.05;  ///< meters
};

struct SimReport {
  bool success = false;
  bool collision = false;    ///< agent center entered an occupied raw cell
  bool timed_out = false;
  int plans = 0;             ///< successful plans, including the first
  int replans = 0;           ///< plans - 1
  int failed_plans = 0;      ///< planning attempts that threw
  double path_length = 0.0;  ///< meters
  double time = 0.0;         ///< seconds until goal, collision or timeout
  std::vector<Vec3> positions;  ///< agent position at every step, start included
};

/**
 * Replanning loop under limited sensing.
 *
 * The known map starts empty and copies cells of the inflated world within
 * `sensing_radius` of the agent after every step. The agent follows the current
 * phi_f by exact evaluation. A replan starts from the current state when newly
 * revealed cells block the rest of the committed trajectory, when
 * `replan_period` has elapsed and the committed end is not the goal, or when
 * the committed end is reached away from the goal. Each plan targets the goal
 * clamped to `horizon` meters along a guide searched on the known map.
 * Failed plans keep the committed trajectory (or hover) and retry after the
 * next period.
 */
SimReport simulate(const Scenario& scenario, const World& world, const SimOptions& options = {});
SimReport simulate(const Scenario& scenario, const SimOptions& options = {});

}  // namespace egoplan
