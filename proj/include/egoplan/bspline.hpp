#pragma once

#include <array>
#include <vector>

#include "egoplan/types.hpp"

namespace egoplan {

/**
 * Uniform cubic B-spline.
 *
 * Control point Q_k..Q_{k+3} drive segment k, which covers
 * [k * dt, (k + 1) * dt]. Duration is (N_c - 3) * dt.
 */
class UniformBspline {
 public:
  static constexpr int kDegree = 3;

  UniformBspline() = default;
  /// Throws SizeError for fewer than 4 control points, PreconditionError for dt <= 0.
  UniformBspline(std::vector<Vec3> ctrl, double dt);

  const std::vector<Vec3>& ctrl() const { return ctrl_; }
  double dt() const { return dt_; }
  int num_ctrl() const { return static_cast<int>(ctrl_.size()); }
  double duration() const { return (num_ctrl() - kDegree) * dt_; }

  /// Same control points with a different knot interval.
  UniformBspline with_dt(double dt) const { return {ctrl_, dt}; }
  UniformBspline with_ctrl(std::vector<Vec3> ctrl) const { return {std::move(ctrl), dt_}; }

  /// Time at which control point i has its largest basis weight, clamped to [0, duration].
  double greville_time(int i) const;

 private:
  std::vector<Vec3> ctrl_;
  double dt_ = 1.0;
};

/// Control points of the first three derivatives, by repeated forward differencing.
struct DerivativeCtrl {
  std::vector<Vec3> vel;   // N_c - 1
  std::vector<Vec3> acc;   // N_c - 2
  std::vector<Vec3> jerk;  // N_c - 3
};

DerivativeCtrl derivative_ctrl_points(const UniformBspline& spline);

/// Forward difference (p[i+1] - p[i]) / dt.
std::vector<Vec3> difference(const std::vector<Vec3>& points, double dt);

/// Adjoint of difference(): accumulates d/dpoints given d/d(differences) into `out`.
void difference_adjoint(const std::vector<Vec3>& grad_diff, double dt, std::vector<Vec3>& out);

/// Position (order 0) or derivative of the given order (<= 3). Throws DomainError outside [0, T].
Vec3 evaluate(const UniformBspline& spline, double t, int order = 0);

/// Segment index and its local parameter u in [0, 1] for time t (clamped).
struct SegmentParam {
  int segment;
  double u;
};
SegmentParam locate(const UniformBspline& spline, double t);

/// Basis weights of the four active control points for the given order and local parameter.
Eigen::Vector4d basis_weights(double u, int order);

/// Samples `count` (>= 2) uniformly spaced positions over [0, duration].
std::vector<Vec3> sample_positions(const UniformBspline& spline, int count);

/// The three control points that realize pos/vel/acc at a spline end for interval dt.
std::array<Vec3, 3> boundary_ctrl(const State& s, double dt);

/// Overwrites the first and last three control points to realize the given boundary states.
UniformBspline pin_boundaries(const UniformBspline& spline, const State& start, const State& goal);

/// Keeps every vertex and splits each segment into ceil(len / max_spacing) equal parts.
Path resample_polyline(const Path& waypoints, double max_spacing);

/**
 * Fits a spline whose knots are assigned to consecutive waypoints.
 *
 * The first and last three control points are solved from the boundary
 * states; the interior ones are least-squares fits of the curve at each
 * waypoint knot. Paths with fewer than 6 waypoints are subdivided first.
 * With rest boundaries the first and last interior waypoints are missed by
 * spacing / sqrt(3); elsewhere the fit is much tighter.
 */
UniformBspline fit_from_waypoints(const Path& waypoints, double dt, const State& start,
                                  const State& goal);

}  // namespace egoplan
