#pragma once

#include <vector>

#include "egoplan/refinement.hpp"
#include "egoplan/scenario.hpp"

namespace egoplan {

struct PlanOptions {
  PlannerConfig config;
  FitWeights fit;
  SearchAlgorithm algorithm = SearchAlgorithm::kBidirectional;
  double control_spacing = 0.4;
};

PlanOptions plan_options(const Scenario& scenario);

struct SplineSummary {
  int num_ctrl = 0;
  double dt = 0.0;
  double duration = 0.0;
};
SplineSummary summarize(const UniformBspline& spline);

/// Wall time per stage, seconds.
struct StageTimings {
  double search = 0.0;
  double prune = 0.0;
  double fit = 0.0;
  double optimize = 0.0;
  double refine = 0.0;
  double validate = 0.0;
  double total = 0.0;
};

struct PlanReport {
  SearchResult search;
  Path guide;  ///< pruned search path, ends replaced by the exact start and goal
  UniformBspline initial;
  UniformBspline phi_s;
  UniformBspline phi_f;
  StageTimings timings;
  std::vector<std::vector<double>> optimize_traces;
  std::vector<double> refine_trace;
  int anchor_rounds = 0;
  std::size_t anchor_count = 0;
  double lambda_c = 0.0;
  double lambda_f = 0.0;
  double anchor_clearance = 0.0;  ///< smallest signed distance over anchors; s_f when none were needed
  double clearance = 0.0;         ///< smallest distance from phi_f samples to an occupied cell, capped at 1 m
  double exceed_ratio_before = 1.0;  ///< r_c of phi_s
  double exceed_ratio_after = 1.0;   ///< r_c of phi_f
  double radial_deviation = 0.0;
  bool refine_warning = false;
};

/// Number of phi_f samples checked against the grid before a plan is accepted.
inline constexpr int kSafetySamples = 200;

/// True when `samples` uniform samples of the spline (both ends included) lie in free cells.
bool samples_free(const UniformBspline& spline, const OccupancyGrid& grid,
                  int samples = kSafetySamples);

/// Distance from `p` to the nearest occupied cell box, searched out to `cap` meters.
double distance_to_obstacle(const OccupancyGrid& grid, const Vec3& p, double cap = 1.0);

/**
 * search -> prune -> fit -> optimize -> refine -> sample check.
 *
 * `grid` is the inflated map. Failures propagate as NoPathError (search) or
 * PlanningFailed with the stage name ("optimize" or "validate").
 */
PlanReport plan_trajectory(const OccupancyGrid& grid, const State& start, const State& goal,
                           const PlanOptions& options);

/// Builds the scenario's world and plans from its start state to its goal at rest.
PlanReport plan_once(const Scenario& scenario);
PlanReport plan_once(const Scenario& scenario, const World& world);

}  // namespace egoplan
