#include <gtest/gtest.h>

#include <random>

#include "egoplan/bspline.hpp"
#include "egoplan/graph_search.hpp"
#include "oracles.hpp"

using namespace egoplan;

namespace {

double unit(std::mt19937_64& rng) { return unit_uniform(rng()); }

UniformBspline random_spline(std::mt19937_64& rng, int n, double dt) {
  std::vector<Vec3> q;
  for (int i = 0; i < n; ++i)
    q.emplace_back(unit(rng) * 4 - 2, unit(rng) * 4 - 2, unit(rng) * 4 - 2);
  return {q, dt};
}

}  // namespace

TEST(Bspline, RejectsTooFewControlPointsAndBadDt) {
  EXPECT_THROW(UniformBspline({Vec3::Zero(), Vec3::Zero(), Vec3::Zero()}, 0.1), SizeError);
  EXPECT_THROW(UniformBspline(std::vector<Vec3>(4, Vec3::Zero()), 0.0), PreconditionError);
}

TEST(Bspline, DerivativeControlPointsOfCollinearUniformPoints) {
  const UniformBspline s({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)}, 0.5);
  const auto d = derivative_ctrl_points(s);
  ASSERT_EQ(d.vel.size(), 3u);
  ASSERT_EQ(d.acc.size(), 2u);
  ASSERT_EQ(d.jerk.size(), 1u);
  for (const auto& v : d.vel) EXPECT_EQ(v, Vec3(2, 0, 0));
  for (const auto& a : d.acc) EXPECT_EQ(a, Vec3::Zero());
  EXPECT_EQ(d.jerk[0], Vec3::Zero());
}

TEST(Bspline, DoublingDtHalvesVelocity) {
  std::mt19937_64 rng(1);
  const auto s = random_spline(rng, 9, 0.25);
  const auto d1 = derivative_ctrl_points(s);
  const auto d2 = derivative_ctrl_points(s.with_dt(0.5));
  for (std::size_t i = 0; i < d1.vel.size(); ++i) EXPECT_EQ(d2.vel[i], d1.vel[i] / 2.0);
}

TEST(Bspline, ChainConsistencyIsExact) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_spline(rng, 12, 0.125 * (1 + trial % 4));
    const auto d = derivative_ctrl_points(s);
    const auto& q = s.ctrl();
    const double dt = s.dt();
    for (std::size_t i = 0; i < d.acc.size(); ++i) {
      const Vec3 direct = ((q[i + 2] - q[i + 1]) / dt - (q[i + 1] - q[i]) / dt) / dt;
      EXPECT_EQ(d.acc[i], direct);
    }
  }
}

TEST(Bspline, MatchesCoxDeBoorAndDerivativeSplines) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_spline(rng, 10, 0.3);
    const auto d = derivative_ctrl_points(s);
    for (int k = 1; k < 7; ++k) {
      // Interior knots and random interior times.
      for (double t : {k * s.dt(), (k + unit(rng)) * s.dt()}) {
        if (t >= s.duration()) continue;
        EXPECT_LT((evaluate(s, t) - oracle::de_boor_eval(s.ctrl(), 3, t, s.dt(), 0)).norm(), 1e-9);
        EXPECT_LT((evaluate(s, t, 1) - oracle::de_boor_eval(d.vel, 2, t, s.dt(), 1)).norm(), 1e-9);
        EXPECT_LT((evaluate(s, t, 2) - oracle::de_boor_eval(d.acc, 1, t, s.dt(), 2)).norm(), 1e-9);
      }
    }
  }
}

TEST(Bspline, ConstantSplineHasZeroDerivatives) {
  const Vec3 c(1.5, -2, 0.25);
  const UniformBspline s(std::vector<Vec3>(7, c), 0.2);
  for (int i = 0; i <= 40; ++i) {
    const double t = s.duration() * i / 40;
    EXPECT_LT((evaluate(s, t) - c).norm(), 1e-12);
    for (int order = 1; order <= 3; ++order) EXPECT_LT(evaluate(s, t, order).norm(), 1e-9);
  }
}

TEST(Bspline, FirstDerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_spline(rng, 9, 0.4);
    for (int i = 0; i < 30; ++i) {
      const double t = 1e-3 + (s.duration() - 2e-3) * unit(rng);
      const double h = 1e-6;
      const Vec3 fd = (evaluate(s, t + h) - evaluate(s, t - h)) / (2 * h);
      const Vec3 an = evaluate(s, t, 1);
      EXPECT_LT((fd - an).norm(), 1e-6 * std::max(1.0, an.norm()));
    }
  }
}

TEST(Bspline, EvaluateOutsideDurationIsDomainError) {
  std::mt19937_64 rng(5);
  const auto s = random_spline(rng, 6, 0.5);
  EXPECT_THROW(evaluate(s, -0.01), DomainError);
  EXPECT_THROW(evaluate(s, s.duration() + 0.01), DomainError);
  EXPECT_NO_THROW(evaluate(s, s.duration()));
  EXPECT_THROW(evaluate(s, 0.1, 4), DomainError);
}

TEST(Bspline, SamplesStayInConvexHullOfActiveWindow) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_spline(rng, 4 + trial % 8, 0.1 + unit(rng));
    const double t = s.duration() * unit(rng);
    const auto [seg, u] = locate(s, t);
    const Eigen::Vector4d w = basis_weights(u, 0);
    // Weights are a partition of unity and non-negative: the point is a convex combination.
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    EXPECT_GE(w.minCoeff(), -1e-15);
    Vec3 lo = s.ctrl()[seg], hi = s.ctrl()[seg];
    for (int m = 1; m < 4; ++m) {
      lo = lo.cwiseMin(s.ctrl()[seg + m]);
      hi = hi.cwiseMax(s.ctrl()[seg + m]);
    }
    const Vec3 p = evaluate(s, t);
    EXPECT_TRUE(((p - lo).array() >= -1e-9).all() && ((hi - p).array() >= -1e-9).all());
  }
}

TEST(Bspline, DurationBookkeeping) {
  std::mt19937_64 rng(7);
  const auto s = random_spline(rng, 11, 0.3);
  const auto t = s.with_dt(0.9);
  EXPECT_EQ(t.ctrl(), s.ctrl());
  EXPECT_DOUBLE_EQ(s.duration(), 8 * 0.3);
  EXPECT_NEAR(t.duration(), 3.0 * s.duration(), 1e-12);
}

TEST(Fit, TwoWaypointsGiveStraightLine) {
  const Vec3 a(0, 0, 1), b(4, 2, 1);
  State start, goal;
  start.pos = a;
  goal.pos = b;
  const auto s = fit_from_waypoints({a, b}, 0.3, start, goal);
  const Vec3 mid = evaluate(s, s.duration() / 2);
  const Vec3 dir = (b - a).normalized();
  const Vec3 off = (mid - a) - (mid - a).dot(dir) * dir;
  EXPECT_LT(off.norm(), 1e-6);
  EXPECT_NEAR((mid - a).dot(dir), (b - a).norm() / 2, 1e-6);
}

TEST(Fit, BoundaryStatesAreMet) {
  State start, goal;
  start.pos = Vec3(0, 0, 1);
  start.vel = Vec3(1, 0, 0);
  start.acc = Vec3(0.2, -0.1, 0);
  goal.pos = Vec3(6, 3, 1);
  goal.vel = Vec3(0, 0.5, 0);
  const Path wps{start.pos, Vec3(3, 0.5, 1), Vec3(5, 2, 1), goal.pos};
  const auto s = fit_from_waypoints(wps, 0.4, start, goal);
  const double T = s.duration();
  EXPECT_LT((evaluate(s, 0, 0) - start.pos).norm(), 1e-6);
  EXPECT_LT((evaluate(s, 0, 1) - start.vel).norm(), 1e-6);
  EXPECT_LT((evaluate(s, 0, 2) - start.acc).norm(), 1e-6);
  EXPECT_LT((evaluate(s, T, 0) - goal.pos).norm(), 1e-6);
  EXPECT_LT((evaluate(s, T, 1) - goal.vel).norm(), 1e-6);
  EXPECT_LT((evaluate(s, T, 2) - goal.acc).norm(), 1e-6);
}

TEST(Fit, LShapeResidualsBelowResolution) {
  // Waypoints from a 0.1 m grid, resampled at 0.15 m (below sqrt(3) * resolution).
  const double resolution = 0.1;
  const Path corner{Vec3(0, 0, 1), Vec3(3, 0, 1), Vec3(3, 3, 1)};
  const Path wps = resample_polyline(corner, 0.15);
  State start, goal;
  start.pos = wps.front();
  goal.pos = wps.back();
  const auto s = fit_from_waypoints(wps, 0.075, start, goal);
  ASSERT_EQ(s.num_ctrl(), static_cast<int>(wps.size()) + 2);
  double worst = 0.0;
  for (std::size_t j = 0; j < wps.size(); ++j)
    worst = std::max(worst, (evaluate(s, j * s.dt()) - wps[j]).norm());
  EXPECT_LT(worst, resolution);
}

TEST(Fit, RestBoundaryResidualIsSpacingOverRootThree) {
  // Pinned measurement: with zero boundary velocity and acceleration the curve
  // cannot reach the first interior waypoint; the gap is spacing / sqrt(3).
  for (double spacing : {0.1, 0.3}) {
    const Path wps = resample_polyline({Vec3(0, 0, 1), Vec3(3, 0, 1), Vec3(3, 3, 1)}, spacing);
    State start, goal;
    start.pos = wps.front();
    goal.pos = wps.back();
    const auto s = fit_from_waypoints(wps, 0.1, start, goal);
    EXPECT_NEAR((evaluate(s, s.dt()) - wps[1]).norm(), spacing / std::sqrt(3.0), 1e-6);
    // Away from the ends the fit tracks the corner closely.
    for (std::size_t j = 3; j + 3 < wps.size(); ++j)
      EXPECT_LT((evaluate(s, j * s.dt()) - wps[j]).norm(), 0.1 * spacing);
  }
}

TEST(Fit, RejectsSingleWaypoint) {
  EXPECT_THROW(fit_from_waypoints({Vec3::Zero()}, 0.1, {}, {}), SizeError);
}

TEST(Resample, KeepsVerticesAndBoundsSpacing) {
  const Path p{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 2.5, 0)};
  const auto r = resample_polyline(p, 0.4);
  EXPECT_EQ(r.front(), p.front());
  EXPECT_EQ(r.back(), p.back());
  EXPECT_NE(std::find(r.begin(), r.end(), p[1]), r.end());
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LE((r[i] - r[i - 1]).norm(), 0.4 + 1e-12);
  EXPECT_NEAR(path_length(r), 3.5, 1e-12);
}
