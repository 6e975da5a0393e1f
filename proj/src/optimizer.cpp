#include "egoplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace egoplan {

void PlannerConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw PreconditionError(msg);
  };
  require(lambda_s >= 0 && lambda_c >= 0 && lambda_d >= 0 && lambda_f >= 0,
          "penalty weights must be non-negative");
  require(s_f > 0, "safety clearance s_f must be positive");
  require(v_m > 0 && a_m > 0 && j_m > 0, "dynamic limits must be positive");
  require(lambda_e > 0 && lambda_e < 1, "lambda_e must lie in (0, 1)");
  require(c_j_factor > 1, "c_j_factor must exceed 1");
  require(max_anchors_per_point > 0, "anchor cap must be positive");
  require(solver.max_iterations > 0 && solver.memory > 0 && solver.max_anchor_rounds > 0 &&
              solver.stall_window > 0,
          "solver budgets must be positive");
  require(solver.penalty_growth >= 1 && solver.clearance_tolerance >= 0 && solver.max_lambda_c > 0,
          "penalty growth must be at least 1 and clearance tolerance non-negative");
}

void FitWeights::validate() const {
  if (!(w_a >= 0 && w_r >= w_a)) throw PreconditionError("fit weights need w_r >= w_a >= 0");
}

PenaltyValue collision_penalty(double c, double s_f) {
  if (c <= 0.0) return {};
  if (c <= s_f) return {c * c * c, 3.0 * c * c, 6.0 * c};
  return {3.0 * s_f * c * c - 3.0 * s_f * s_f * c + s_f * s_f * s_f, 6.0 * s_f * c - 3.0 * s_f * s_f,
          6.0 * s_f};
}

TailCoefficients feasibility_tails(double limit, double lambda_e, double c_j_factor) {
  TailCoefficients k{};
  k.soft = lambda_e * limit;
  k.c_j = c_j_factor * k.soft;
  // Match value, slope and curvature of (x - soft)^3 at x = c_j.
  const double e = k.c_j - k.soft;
  k.a2 = 3.0 * e;
  k.b2 = 3.0 * e * e - 2.0 * k.a2 * k.c_j;
  k.c2 = e * e * e - k.a2 * k.c_j * k.c_j - k.b2 * k.c_j;
  k.a1 = k.a2;
  k.b1 = -k.b2;
  k.c1 = k.c2;
  return k;
}

PenaltyValue feasibility_penalty(double x, const TailCoefficients& k) {
  if (x < -k.c_j) return {k.a1 * x * x + k.b1 * x + k.c1, 2.0 * k.a1 * x + k.b1, 2.0 * k.a1};
  if (x < -k.soft) {
    const double e = -k.soft - x;
    return {e * e * e, -3.0 * e * e, 6.0 * e};
  }
  if (x <= k.soft) return {};
  if (x < k.c_j) {
    const double e = x - k.soft;
    return {e * e * e, 3.0 * e * e, 6.0 * e};
  }
  return {k.a2 * x * x + k.b2 * x + k.c2, 2.0 * k.a2 * x + k.b2, 2.0 * k.a2};
}

namespace {

std::vector<Vec3> zeros(std::size_t n) { return std::vector<Vec3>(n, Vec3::Zero()); }

/// Pulls gradients on V, A, J control points back to Q.
std::vector<Vec3> backprop(const UniformBspline& s, std::vector<Vec3> g_vel, std::vector<Vec3> g_acc,
                           const std::vector<Vec3>& g_jerk) {
  const double dt = s.dt();
  difference_adjoint(g_jerk, dt, g_acc);
  difference_adjoint(g_acc, dt, g_vel);
  auto g_q = zeros(s.ctrl().size());
  difference_adjoint(g_vel, dt, g_q);
  return g_q;
}

}  // namespace

CostGrad smoothness(const UniformBspline& spline) {
  const auto d = derivative_ctrl_points(spline);
  CostGrad out;
  std::vector<Vec3> g_acc(d.acc.size()), g_jerk(d.jerk.size());
  for (std::size_t i = 0; i < d.acc.size(); ++i) {
    out.value += d.acc[i].squaredNorm();
    g_acc[i] = 2.0 * d.acc[i];
  }
  for (std::size_t i = 0; i < d.jerk.size(); ++i) {
    out.value += d.jerk[i].squaredNorm();
    g_jerk[i] = 2.0 * d.jerk[i];
  }
  out.grad = backprop(spline, zeros(d.vel.size()), std::move(g_acc), g_jerk);
  return out;
}

CostGrad collision(const UniformBspline& spline, const AnchorSet& anchors,
                   const PlannerConfig& config) {
  CostGrad out;
  out.grad = zeros(spline.ctrl().size());
  const int n = std::min(spline.num_ctrl(), anchors.num_ctrl());
  for (int i = 0; i < n; ++i) {
    for (const auto& pair : anchors.at(i)) {
      const double c = config.s_f - signed_dist(spline.ctrl()[i], pair);
      const auto pen = collision_penalty(c, config.s_f);
      out.value += pen.value;
      // dc/dQ = -v
      out.grad[i] -= pen.d1 * pair.v;
    }
  }
  return out;
}

CostGrad feasibility(const UniformBspline& spline, const PlannerConfig& config) {
  const auto d = derivative_ctrl_points(spline);
  CostGrad out;
  auto level = [&](const std::vector<Vec3>& pts, double limit) {
    const auto tails = feasibility_tails(limit, config.lambda_e, config.c_j_factor);
    std::vector<Vec3> g(pts.size(), Vec3::Zero());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (int r = 0; r < 3; ++r) {
        const auto pen = feasibility_penalty(pts[i][r], tails);
        out.value += pen.value;
        g[i][r] = pen.d1;
      }
    }
    return g;
  };
  auto g_vel = level(d.vel, config.v_m);
  auto g_acc = level(d.acc, config.a_m);
  auto g_jerk = level(d.jerk, config.j_m);
  out.grad = backprop(spline, std::move(g_vel), std::move(g_acc), g_jerk);
  return out;
}

CostGrad total_objective(const UniformBspline& spline, const AnchorSet& anchors,
                         const PlannerConfig& config) {
  CostGrad out;
  out.grad = zeros(spline.ctrl().size());
  auto accumulate = [&](double w, const CostGrad& term) {
    if (w == 0.0) return;
    out.value += w * term.value;
    for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += w * term.grad[i];
  };
  if (config.lambda_s != 0.0) accumulate(config.lambda_s, smoothness(spline));
  if (config.lambda_c != 0.0) accumulate(config.lambda_c, collision(spline, anchors, config));
  if (config.lambda_d != 0.0) accumulate(config.lambda_d, feasibility(spline, config));
  const std::size_t n = out.grad.size();
  for (std::size_t m = 0; m < 3 && m < n; ++m) {
    out.grad[m].setZero();
    out.grad[n - 1 - m].setZero();
  }
  return out;
}

Eigen::VectorXd pack_movable(const UniformBspline& spline) {
  const int lo = first_movable();
  const int hi = last_movable(spline);
  Eigen::VectorXd x(3 * std::max(0, hi - lo + 1));
  for (int i = lo; i <= hi; ++i) x.segment<3>(3 * (i - lo)) = spline.ctrl()[i];
  return x;
}

UniformBspline unpack_movable(const UniformBspline& base, const Eigen::VectorXd& x) {
  auto ctrl = base.ctrl();
  const int lo = first_movable();
  for (Eigen::Index k = 0; k < x.size() / 3; ++k) ctrl[lo + k] = x.segment<3>(3 * k);
  return base.with_ctrl(std::move(ctrl));
}

Eigen::VectorXd pack_movable_grad(const std::vector<Vec3>& grad) {
  const int lo = first_movable();
  const int hi = static_cast<int>(grad.size()) - 4;
  Eigen::VectorXd g(3 * std::max(0, hi - lo + 1));
  for (int i = lo; i <= hi; ++i) g.segment<3>(3 * (i - lo)) = grad[i];
  return g;
}

namespace {

int nearest_free(const UniformBspline& spline, const OccupancyGrid& grid, int from, int step) {
  for (int i = from; i >= 0 && i < spline.num_ctrl(); i += step) {
    if (!grid.occupied(spline.ctrl()[i])) return i;
  }
  return -1;
}

}  // namespace

int add_collision_anchors(const UniformBspline& spline, const OccupancyGrid& grid,
                          const Path& guide, const PlannerConfig& config, AnchorSet& anchors,
                          bool reset) {
  int added = 0;
  for (const auto& range : find_collision_segments(spline, grid)) {
    const int lo = std::max(range.first, first_movable());
    const int hi = std::min(range.last, last_movable(spline));
    if (lo > hi) continue;

    // A segment with a point still behind one of its anchor planes is already being pushed out;
    // stacking more directions on it only pins it between obstacles.
    if (reset) {
      for (int i = range.first; i <= range.last; ++i) anchors.clear(i);
    }
    bool handled = false;
    for (int i = range.first; i <= range.last && !handled; ++i) {
      for (const auto& pair : anchors.at(i)) handled = handled || signed_dist(spline.ctrl()[i], pair) < 0.0;
    }
    if (handled) continue;

    // Local guide around the segment; the global guide is the fallback.
    Path local = guide;
    const int a = nearest_free(spline, grid, range.first - 1, -1);
    const int b = nearest_free(spline, grid, range.last + 1, +1);
    if (a >= 0 && b >= 0) {
      try {
        local = bidirectional_astar(grid, spline.ctrl()[a], spline.ctrl()[b]).path;
      } catch (const Error&) {
      }
    }
    if (local.empty()) continue;

    for (int i = lo; i <= hi; ++i) {
      const auto probe = collision_probe(spline, grid, i);
      if (!probe) continue;
      const Vec3 tangent = ctrl_tangent(spline, i);
      AnchorPair pair;
      try {
        try {
          pair = generate_anchor(*probe, local, tangent, grid);
        } catch (const NoCrossingError&) {
          pair = anchor_toward(*probe, nearest_on_guide(*probe, local), grid);
        }
      } catch (const Error&) {
        continue;
      }
      if (anchors.add(i, pair, config.max_anchors_per_point, config.anchor_dedup_deg)) ++added;
    }
  }
  return added;
}

double min_anchor_clearance(const UniformBspline& spline, const AnchorSet& anchors) {
  double best = std::numeric_limits<double>::infinity();
  const int n = std::min(spline.num_ctrl(), anchors.num_ctrl());
  for (int i = 0; i < n; ++i) {
    for (const auto& pair : anchors.at(i)) best = std::min(best, signed_dist(spline.ctrl()[i], pair));
  }
  return best;
}

OptimizeResult optimize(const UniformBspline& spline, const OccupancyGrid& grid,
                        const SearchResult& guide, const PlannerConfig& config) {
  config.validate();
  OptimizeResult out;
  out.spline = spline;
  out.anchors = AnchorSet(spline.num_ctrl());
  PlannerConfig round_config = config;
  const double required = config.s_f - config.solver.clearance_tolerance;

  for (;;) {
    // Anchors placed so far that the last solve failed to satisfy.
    if (out.rounds > 0 && min_anchor_clearance(out.spline, out.anchors) < required) {
      round_config.lambda_c = std::min(round_config.lambda_c * config.solver.penalty_growth,
                                       std::max(config.solver.max_lambda_c, config.lambda_c));
    }
    const int added = add_collision_anchors(out.spline, grid, guide.path, config, out.anchors);
    if (out.rounds > 0 && added == 0) {
      add_collision_anchors(out.spline, grid, guide.path, config, out.anchors, true);
    }
    const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      const auto cg = total_objective(unpack_movable(out.spline, x), out.anchors, round_config);
      g = pack_movable_grad(cg.grad);
      return cg.value;
    };
    auto solved = minimize_lbfgs(f, pack_movable(out.spline), config.solver);
    out.spline = unpack_movable(out.spline, solved.x);
    out.iterations += solved.iterations;
    out.traces.push_back(std::move(solved.trace));
    out.lambda_c = round_config.lambda_c;
    ++out.rounds;

    const bool collision_free = find_collision_segments(out.spline, grid).empty();
    if (collision_free && min_anchor_clearance(out.spline, out.anchors) >= required) return out;
    if (out.rounds >= config.solver.max_anchor_rounds) {
      // Clearance is a target; gaps narrower than 2 s_f cannot satisfy opposing anchors.
      if (collision_free) return out;
      throw PlanningFailed("optimize", "anchor rounds exhausted with collisions remaining",
                           out.spline);
    }
  }
}

}  // namespace egoplan
