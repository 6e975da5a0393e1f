#include "egoplan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace egoplan {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

PlanOptions plan_options(const Scenario& scenario) {
  PlanOptions o;
  o.config = scenario.config;
  o.fit = scenario.fit;
  o.algorithm = scenario.algorithm;
  o.control_spacing = scenario.control_spacing;
  return o;
}

SplineSummary summarize(const UniformBspline& spline) {
  return {spline.num_ctrl(), spline.dt(), spline.num_ctrl() >= 4 ? spline.duration() : 0.0};
}

bool samples_free(const UniformBspline& spline, const OccupancyGrid& grid, int samples) {
  for (const auto& p : sample_positions(spline, samples)) {
    if (grid.occupied(p)) return false;
  }
  return true;
}

double distance_to_obstacle(const OccupancyGrid& grid, const Vec3& p, double cap) {
  const double res = grid.resolution();
  const int reach = static_cast<int>(std::ceil(cap / res)) + 1;
  const Index3 c = grid.world_to_cell(p);
  double best2 = cap * cap;
  for (int dz = -reach; dz <= reach; ++dz) {
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const Index3 n = c + Index3(dx, dy, dz);
        if (!grid.in_bounds(n) || !grid.occupied(n)) continue;
        const Vec3 lo = grid.origin() + n.cast<double>() * res;
        const Vec3 gap = (lo - p).cwiseMax(p - (lo + Vec3::Constant(res))).cwiseMax(0.0);
        best2 = std::min(best2, gap.squaredNorm());
      }
    }
  }
  return std::sqrt(best2);
}

PlanReport plan_trajectory(const OccupancyGrid& grid, const State& start, const State& goal,
                           const PlanOptions& options) {
  options.config.validate();
  options.fit.validate();
  const auto t_total = Clock::now();
  PlanReport r;

  auto t0 = Clock::now();
  r.search = run_search(options.algorithm, grid, start.pos, goal.pos);
  r.timings.search = since(t0);

  t0 = Clock::now();
  r.guide = prune_path(r.search, grid);
  r.guide.front() = start.pos;
  if (r.guide.size() == 1) r.guide.push_back(goal.pos);
  r.guide.back() = goal.pos;
  r.timings.prune = since(t0);

  t0 = Clock::now();
  const Path waypoints = resample_polyline(r.guide, options.control_spacing);
  const double spacing = path_length(waypoints) / std::max<std::size_t>(waypoints.size() - 1, 1);
  const double dt = std::max(spacing, 1e-3) / options.config.v_m;
  r.initial = fit_from_waypoints(waypoints, dt, start, goal);
  r.timings.fit = since(t0);

  t0 = Clock::now();
  SearchResult guide = r.search;
  guide.path = r.guide;
  auto opt = optimize(r.initial, grid, guide, options.config);
  r.timings.optimize = since(t0);
  r.phi_s = opt.spline;
  r.optimize_traces = std::move(opt.traces);
  r.anchor_rounds = opt.rounds;
  r.anchor_count = opt.anchors.total();
  r.lambda_c = opt.lambda_c;
  r.anchor_clearance = std::min(options.config.s_f, min_anchor_clearance(r.phi_s, opt.anchors));

  t0 = Clock::now();
  auto refined = refine(r.phi_s, options.config, options.fit);
  r.timings.refine = since(t0);
  r.phi_f = refined.spline;
  r.refine_trace = std::move(refined.trace);
  r.exceed_ratio_before = refined.ratio;
  r.refine_warning = refined.warning;
  r.lambda_f = refined.lambda_f;
  r.radial_deviation = refined.radial_deviation;

  t0 = Clock::now();
  if (!samples_free(r.phi_f, grid)) {
    // The retimed phi_s keeps the optimized shape exactly.
    const UniformBspline retimed = reallocate(r.phi_s, options.config);
    if (!samples_free(retimed, grid)) {
      throw PlanningFailed("validate", "trajectory samples enter occupied cells", r.phi_f);
    }
    r.phi_f = retimed;
    r.refine_warning = true;
    r.radial_deviation = 0.0;
  }
  r.exceed_ratio_after = exceed_ratio(r.phi_f, options.config);
  r.clearance = std::numeric_limits<double>::infinity();
  for (const auto& p : sample_positions(r.phi_f, kSafetySamples)) {
    r.clearance = std::min(r.clearance, distance_to_obstacle(grid, p));
  }
  r.timings.validate = since(t0);
  r.timings.total = since(t_total);
  return r;
}

PlanReport plan_once(const Scenario& scenario, const World& world) {
  State goal;
  goal.pos = scenario.goal;
  return plan_trajectory(world.inflated, scenario.start, goal, plan_options(scenario));
}

PlanReport plan_once(const Scenario& scenario) { return plan_once(scenario, build_world(scenario)); }

}  // namespace egoplan
