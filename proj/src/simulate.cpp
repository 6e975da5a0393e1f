#include "egoplan/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace egoplan {

namespace {

/// Copies inflated-world cells within `radius` of `p` into `known`; true when any newly known cell is occupied.
bool reveal(OccupancyGrid& known, std::vector<std::uint8_t>& seen, const OccupancyGrid& truth,
            const Vec3& p, double radius) {
  const double res = truth.resolution();
  const int reach = static_cast<int>(std::ceil(radius / res));
  const Index3 c = truth.world_to_cell(p);
  const double r2 = radius * radius;
  bool blocked = false;
  for (int z = std::max(0, c.z() - reach); z <= std::min(truth.dims().z() - 1, c.z() + reach); ++z) {
    for (int y = std::max(0, c.y() - reach); y <= std::min(truth.dims().y() - 1, c.y() + reach); ++y) {
      for (int x = std::max(0, c.x() - reach); x <= std::min(truth.dims().x() - 1, c.x() + reach); ++x) {
        const Index3 n(x, y, z);
        const std::size_t idx = truth.linear_index(n);
        if (seen[idx] || (truth.cell_center(n) - p).squaredNorm() > r2) continue;
        seen[idx] = 1;
        if (truth.occupied_index(idx)) {
          known.set_occupied(n);
          blocked = true;
        }
      }
    }
  }
  return blocked;
}

/// Point `horizon` meters along `path`, or its end.
Vec3 along(const Path& path, double horizon) {
  double left = horizon;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double len = (path[i] - path[i - 1]).norm();
    if (len >= left) return path[i - 1] + (path[i] - path[i - 1]) * (left / len);
    left -= len;
  }
  return path.back();
}

bool remaining_free(const UniformBspline& s, double t0, const OccupancyGrid& grid, double step) {
  const double T = s.duration();
  for (double t = t0; t < T; t += step) {
    if (grid.occupied(evaluate(s, t))) return false;
  }
  return !grid.occupied(evaluate(s, T));
}

}  // namespace

SimReport simulate(const Scenario& scenario, const World& world, const SimOptions& options) {
  if (!(options.sensing_radius > 0)) throw PreconditionError("sensing_radius must be positive");
  if (!(options.replan_period > 0) || !(options.step > 0) || !(options.horizon > 0))
    throw PreconditionError("replan_period, step and horizon must be positive");
  const PlanOptions plan_opts = plan_options(scenario);
  const Vec3 goal = scenario.goal;
  const double timeout = options.timeout > 0
                             ? options.timeout
                             : 3.0 * (goal - scenario.start.pos).norm() / scenario.config.v_m + 20.0;

  OccupancyGrid known(world.inflated.bounds(), world.inflated.resolution());
  std::vector<std::uint8_t> seen(world.inflated.cell_count(), 0);

  SimReport report;
  State state = scenario.start;
  report.positions.push_back(state.pos);
  reveal(known, seen, world.inflated, state.pos, options.sensing_radius);

  std::optional<UniformBspline> traj;
  bool ends_at_goal = false;
  double t_local = 0.0, since_plan = 0.0, clock = 0.0;
  bool want_plan = true, last_failed = false;

  auto try_plan = [&] {
    since_plan = 0.0;
    want_plan = false;
    try {
      const SearchResult global = run_search(plan_opts.algorithm, known, state.pos, goal);
      Path guide = prune_path(global, known);
      guide.front() = state.pos;
      if (guide.size() == 1) guide.push_back(goal);
      guide.back() = goal;
      const Vec3 target = along(guide, options.horizon);
      State local;
      local.pos = target;
      auto r = plan_trajectory(known, state, local, plan_opts);
      traj = std::move(r.phi_f);
      ends_at_goal = (target - goal).norm() <= options.goal_tolerance;
      t_local = 0.0;
      ++report.plans;
      last_failed = false;
    } catch (const Error&) {
      ++report.failed_plans;
      last_failed = true;
    }
  };

  while (true) {
    if (want_plan) try_plan();
    if ((state.pos - goal).norm() <= options.goal_tolerance &&
        (!traj || t_local >= traj->duration())) {
      report.success = true;
      break;
    }
    if (clock >= timeout) {
      report.timed_out = true;
      break;
    }

    clock += options.step;
    since_plan += options.step;
    if (traj) {
      t_local = std::min(t_local + options.step, traj->duration());
      const Vec3 p = evaluate(*traj, t_local);
      report.path_length += (p - state.pos).norm();
      state.pos = p;
      state.vel = evaluate(*traj, t_local, 1);
      state.acc = evaluate(*traj, t_local, 2);
    } else {
      state.vel.setZero();
      state.acc.setZero();
    }
    report.positions.push_back(state.pos);
    if (world.raw.occupied(state.pos)) {
      report.collision = true;
      break;
    }

    // After a failed attempt, only the period retries; otherwise every step would re-plan.
    const bool may_retry = !last_failed || since_plan >= options.replan_period;
    const bool blocked = reveal(known, seen, world.inflated, state.pos, options.sensing_radius);
    if (traj && blocked && may_retry && !remaining_free(*traj, t_local, known, options.step))
      want_plan = true;
    if (since_plan >= options.replan_period && (!traj || !ends_at_goal)) want_plan = true;
    if (traj && t_local >= traj->duration() && !ends_at_goal && may_retry) want_plan = true;
  }
  report.time = clock;
  report.replans = std::max(report.plans - 1, 0);
  return report;
}

SimReport simulate(const Scenario& scenario, const SimOptions& options) {
  return simulate(scenario, build_world(scenario), options);
}

}  // namespace egoplan
