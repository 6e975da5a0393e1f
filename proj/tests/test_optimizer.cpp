#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "egoplan/optimizer.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace egoplan;

namespace {

// One-sided limit at a seam by linear extrapolation from probes at h and 2h.
constexpr double kH = 1e-7;

template <typename F>
PenaltyValue side_limit(F f, double seam, double sign) {
  const auto a = f(seam + sign * kH), b = f(seam + 2 * sign * kH);
  return {2 * a.value - b.value, 2 * a.d1 - b.d1, 2 * a.d2 - b.d2};
}

double unit(std::mt19937_64& rng) { return unit_uniform(rng()); }

UniformBspline random_spline(std::mt19937_64& rng, int n, double dt, double jitter) {
  std::vector<Vec3> q;
  for (int i = 0; i < n; ++i) {
    q.emplace_back(0.4 * i + jitter * (unit(rng) - 0.5), jitter * (unit(rng) - 0.5),
                   1.0 + jitter * (unit(rng) - 0.5));
  }
  return {q, dt};
}

/// Anchors whose clearance argument c spans all three penalty branches.
AnchorSet random_anchors(std::mt19937_64& rng, const UniformBspline& s, double s_f) {
  AnchorSet set(s.num_ctrl());
  for (int i = 0; i < s.num_ctrl(); ++i) {
    const int count = static_cast<int>(unit(rng) * 3);
    for (int k = 0; k < count; ++k) {
      Vec3 v(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
      v.normalize();
      const double d = -1.0 + 2.0 * s_f * 3.0 * unit(rng);  // c = s_f - d in [s_f - 0.8, s_f + 1]
      set.add(i, {s.ctrl()[i] - d * v, v}, 8, 0.0);
    }
  }
  return set;
}

double fd_error(const UniformBspline& s, const std::function<CostGrad(const UniformBspline&)>& term) {
  const auto analytic = term(s);
  const auto f = [&](const std::vector<double>& x) {
    return term(s.with_ctrl(oracle::unflatten(x))).value;
  };
  return oracle::max_rel_error(oracle::flatten(analytic.grad),
                               oracle::fd_gradient(f, oracle::flatten(s.ctrl())));
}

}  // namespace

TEST(CollisionPenalty, BranchesAndSeams) {
  const double s_f = 0.3;
  EXPECT_EQ(collision_penalty(-0.5, s_f).value, 0.0);
  EXPECT_DOUBLE_EQ(collision_penalty(0.2, s_f).value, 0.008);
  // Seam at c = s_f: both expressions give s_f^3 with slope 3 s_f^2.
  const double mid = s_f * s_f * s_f;
  const double outer = 3 * s_f * s_f * s_f - 3 * s_f * s_f * s_f + s_f * s_f * s_f;
  EXPECT_NEAR(mid, outer, 1e-15);
  for (double seam : {0.0, s_f}) {
    const auto f = [&](double c) { return collision_penalty(c, s_f); };
    const auto lo = side_limit(f, seam, -1), hi = side_limit(f, seam, +1);
    EXPECT_NEAR(lo.value, hi.value, 1e-9);
    EXPECT_NEAR(lo.d1, hi.d1, 1e-9);
  }
  EXPECT_NEAR(collision_penalty(s_f, s_f).d1, 3 * s_f * s_f, 1e-15);
}

TEST(CollisionPenalty, MonotoneInDistance) {
  const double s_f = 0.3;
  double prev = std::numeric_limits<double>::infinity();
  for (double d = -2.0; d <= 1.0; d += 1e-3) {
    const double j = collision_penalty(s_f - d, s_f).value;
    EXPECT_LE(j, prev);
    prev = j;
  }
}

TEST(FeasibilityPenalty, TailsAreC2AtEverySeam) {
  for (double limit : {2.0, 3.0, 4.0}) {
    const auto k = feasibility_tails(limit, 0.95, 1.2);
    // Exact seam values: cubic branch (c_j - soft)^3 against the quadratic tail.
    const double e = k.c_j - k.soft;
    const double tail = k.a2 * k.c_j * k.c_j + k.b2 * k.c_j + k.c2;
    EXPECT_NEAR(tail, e * e * e, 1e-9);
    EXPECT_NEAR(2 * k.a2 * k.c_j + k.b2, 3 * e * e, 1e-9);
    EXPECT_NEAR(2 * k.a2, 6 * e, 1e-9);
    const double ltail = k.a1 * k.c_j * k.c_j - k.b1 * k.c_j + k.c1;
    EXPECT_NEAR(ltail, e * e * e, 1e-9);
    EXPECT_NEAR(-2 * k.a1 * k.c_j + k.b1, -3 * e * e, 1e-9);
    for (double seam : {-k.c_j, -k.soft, k.soft, k.c_j}) {
      const auto f = [&](double x) { return feasibility_penalty(x, k); };
      const auto lo = side_limit(f, seam, -1), hi = side_limit(f, seam, +1);
      EXPECT_NEAR(lo.value, hi.value, 1e-9);
      EXPECT_NEAR(lo.d1, hi.d1, 1e-9);
      EXPECT_NEAR(lo.d2, hi.d2, 1e-9);
    }
  }
}

TEST(Smoothness, CollinearAndScaling) {
  std::vector<Vec3> q;
  for (int i = 0; i < 8; ++i) q.emplace_back(i, 2 * i, 0);
  const auto flat = smoothness(UniformBspline(q, 0.5));
  EXPECT_EQ(flat.value, 0.0);
  for (const auto& g : flat.grad) EXPECT_EQ(g.norm(), 0.0);

  std::mt19937_64 rng(3);
  const auto s = random_spline(rng, 9, 0.3, 0.5);
  auto doubled = s.ctrl();
  for (auto& p : doubled) p *= 2.0;
  EXPECT_NEAR(smoothness(s.with_ctrl(doubled)).value, 4.0 * smoothness(s).value,
              1e-12 * smoothness(s).value);
}

TEST(Collision, SatisfiedAnchorsGiveZero) {
  std::mt19937_64 rng(4);
  const auto s = random_spline(rng, 8, 0.3, 0.3);
  AnchorSet set(s.num_ctrl());
  set.add(4, {s.ctrl()[4] - 0.5 * Vec3::UnitY(), Vec3::UnitY()});
  const auto cg = collision(s, set, PlannerConfig{});
  EXPECT_EQ(cg.value, 0.0);
  for (const auto& g : cg.grad) EXPECT_EQ(g.norm(), 0.0);
}

TEST(Feasibility, WithinSoftLimitGivesZero) {
  std::vector<Vec3> q;
  for (int i = 0; i < 8; ++i) q.emplace_back(0.1 * i, 0, 0);
  const auto cg = feasibility(UniformBspline(q, 0.1), PlannerConfig{});  // 1 m/s
  EXPECT_EQ(cg.value, 0.0);
}

TEST(Gradients, HundredRandomInstancesMatchFiniteDifferences) {
  std::mt19937_64 rng(2024);
  PlannerConfig config;
  double worst_s = 0, worst_c = 0, worst_d = 0, worst_t = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 6 + static_cast<int>(unit(rng) * 8);
    const double dt = 0.1 + 0.3 * unit(rng);
    const auto s = random_spline(rng, n, dt, 0.6);
    const auto anchors = random_anchors(rng, s, config.s_f);
    worst_s = std::max(worst_s, fd_error(s, [](const UniformBspline& x) { return smoothness(x); }));
    worst_c = std::max(worst_c, fd_error(s, [&](const UniformBspline& x) {
                         return collision(x, anchors, config);
                       }));
    worst_d = std::max(worst_d, fd_error(s, [&](const UniformBspline& x) {
                         return feasibility(x, config);
                       }));
    // The total zeroes boundary rows, so compare on movable points only.
    const auto total = total_objective(s, anchors, config);
    const auto f = [&](const std::vector<double>& x) {
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
      return total_objective(unpack_movable(s, v), anchors, config).value;
    };
    const Eigen::VectorXd x0 = pack_movable(s);
    const Eigen::VectorXd g0 = pack_movable_grad(total.grad);
    worst_t = std::max(worst_t, oracle::max_rel_error(
                                    std::vector<double>(g0.data(), g0.data() + g0.size()),
                                    oracle::fd_gradient(f, std::vector<double>(
                                                               x0.data(), x0.data() + x0.size()))));
  }
  EXPECT_LT(worst_s, 1e-5);
  EXPECT_LT(worst_c, 1e-5);
  EXPECT_LT(worst_d, 1e-5);
  EXPECT_LT(worst_t, 1e-5);
}

TEST(Feasibility, VelocityViolationGradient) {
  std::vector<Vec3> q;
  for (int i = 0; i < 8; ++i) q.emplace_back(0.5 * i, 0.05 * i * i, 0);
  const UniformBspline s(q, 0.2);  // 2.5 m/s along x
  EXPECT_GT(feasibility(s, PlannerConfig{}).value, 0.0);
  EXPECT_LT(fd_error(s, [](const UniformBspline& x) { return feasibility(x, PlannerConfig{}); }),
            1e-5);
}

TEST(TotalObjective, ZeroWeightsAndAdditivity) {
  std::mt19937_64 rng(6);
  const auto s = random_spline(rng, 10, 0.25, 0.5);
  const auto anchors = random_anchors(rng, s, 0.3);
  PlannerConfig zero;
  zero.lambda_s = zero.lambda_c = zero.lambda_d = 0.0;
  const auto z = total_objective(s, anchors, zero);
  EXPECT_EQ(z.value, 0.0);
  for (const auto& g : z.grad) EXPECT_EQ(g.norm(), 0.0);

  PlannerConfig config;
  config.lambda_c = 0.0;
  const AnchorSet none(s.num_ctrl());
  EXPECT_DOUBLE_EQ(total_objective(s, none, config).value,
                   config.lambda_s * smoothness(s).value + config.lambda_d * feasibility(s, config).value);

  const auto t = total_objective(s, anchors, PlannerConfig{});
  for (int m = 0; m < 3; ++m) {
    EXPECT_EQ(t.grad[m].norm(), 0.0);
    EXPECT_EQ(t.grad[t.grad.size() - 1 - m].norm(), 0.0);
  }
}

TEST(Optimize, FreeMapDoesNotIncreaseSmoothness) {
  const Box world{Vec3(0, -3, 0), Vec3(10, 3, 3)};
  const OccupancyGrid grid(world, 0.1);
  State start, goal;
  start.pos = Vec3(1, 0, 1.5);
  goal.pos = Vec3(9, 1, 1.5);
  const Path wp{start.pos, Vec3(5, -1, 1.5), goal.pos};
  const auto init = fit_from_waypoints(resample_polyline(wp, 0.4), 0.3, start, goal);
  const auto guide = bidirectional_astar(grid, start.pos, goal.pos);
  const auto r = optimize(init, grid, guide, PlannerConfig{});
  EXPECT_LE(smoothness(r.spline).value, smoothness(init).value);
  EXPECT_EQ(r.anchors.total(), 0u);
  EXPECT_EQ(collision(r.spline, r.anchors, PlannerConfig{}).value, 0.0);
  EXPECT_EQ(r.rounds, 1);
}

TEST(Optimize, SlabSceneReachesClearance) {
  const auto scene = testing_scenes::slab_scene();
  ASSERT_FALSE(find_collision_segments(scene.initial, scene.grid).empty());
  const PlannerConfig config;
  const auto r = optimize(scene.initial, scene.grid, scene.guide, config);
  EXPECT_TRUE(find_collision_segments(r.spline, scene.grid).empty());
  ASSERT_GT(r.anchors.total(), 0u);
  for (int i = first_movable(); i <= last_movable(r.spline); ++i) {
    for (const auto& pair : r.anchors.at(i)) {
      EXPECT_GE(signed_dist(r.spline.ctrl()[i], pair), config.s_f - 1e-3) << "control point " << i;
    }
  }
  // Objective never increases within a round.
  for (const auto& trace : r.traces) {
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1]);
  }
  // Boundary states untouched.
  const double T = r.spline.duration();
  for (int k = 0; k <= 2; ++k) {
    EXPECT_LT((evaluate(r.spline, 0, k) - evaluate(scene.initial, 0, k)).norm(), 1e-6);
    EXPECT_LT((evaluate(r.spline, T, k) - evaluate(scene.initial, T, k)).norm(), 1e-6);
  }
  EXPECT_NEAR(evaluate(r.spline, 0).x(), scene.start.pos.x(), 1e-6);
  EXPECT_NEAR(evaluate(r.spline, T).x(), scene.goal.pos.x(), 1e-6);
}

TEST(Optimize, ExhaustedRoundsCarryBestIterate) {
  auto scene = testing_scenes::slab_scene();
  PlannerConfig config;
  config.solver.max_anchor_rounds = 1;
  try {
    optimize(scene.initial, scene.grid, scene.guide, config);
    FAIL() << "expected PlanningFailed";
  } catch (const PlanningFailed& e) {
    EXPECT_EQ(e.stage(), "optimize");
    EXPECT_EQ(e.best().num_ctrl(), scene.initial.num_ctrl());
  }
}

TEST(Config, ValidateRejectsBadFields) {
  PlannerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.lambda_e = 1.0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = PlannerConfig{};
  c.s_f = 0.0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = PlannerConfig{};
  c.lambda_c = -1.0;
  EXPECT_THROW(c.validate(), PreconditionError);
}
