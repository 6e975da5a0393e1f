#include "egoplan/bspline.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "egoplan/graph_search.hpp"

namespace egoplan {

UniformBspline::UniformBspline(std::vector<Vec3> ctrl, double dt) : ctrl_(std::move(ctrl)), dt_(dt) {
  if (ctrl_.size() < 4) throw SizeError("a cubic B-spline needs at least 4 control points");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw PreconditionError("knot interval must be positive");
}

double UniformBspline::greville_time(int i) const {
  return std::clamp((i - 1) * dt_, 0.0, duration());
}

std::vector<Vec3> difference(const std::vector<Vec3>& points, double dt) {
  std::vector<Vec3> out;
  if (points.size() < 2) return out;
  out.reserve(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) out.push_back((points[i + 1] - points[i]) / dt);
  return out;
}

void difference_adjoint(const std::vector<Vec3>& grad_diff, double dt, std::vector<Vec3>& out) {
  for (std::size_t i = 0; i < grad_diff.size(); ++i) {
    out[i + 1] += grad_diff[i] / dt;
    out[i] -= grad_diff[i] / dt;
  }
}

DerivativeCtrl derivative_ctrl_points(const UniformBspline& spline) {
  if (spline.num_ctrl() < 4) throw SizeError("derivative control points need N_c >= 4");
  DerivativeCtrl d;
  d.vel = difference(spline.ctrl(), spline.dt());
  d.acc = difference(d.vel, spline.dt());
  d.jerk = difference(d.acc, spline.dt());
  return d;
}

Eigen::Vector4d basis_weights(double u, int order) {
  static const Eigen::Matrix4d kBasis = (Eigen::Matrix4d() << 1, 4, 1, 0,  //
                                         -3, 0, 3, 0,                     //
                                         3, -6, 3, 0,                     //
                                         -1, 3, -3, 1)
                                            .finished() /
                                        6.0;
  Eigen::RowVector4d powers;
  switch (order) {
    case 0:
      powers << 1, u, u * u, u * u * u;
      break;
    case 1:
      powers << 0, 1, 2 * u, 3 * u * u;
      break;
    case 2:
      powers << 0, 0, 2, 6 * u;
      break;
    case 3:
      powers << 0, 0, 0, 6;
      break;
    default:
      throw DomainError("derivative order must be in 0..3");
  }
  return (powers * kBasis).transpose();
}

SegmentParam locate(const UniformBspline& spline, double t) {
  const int last = spline.num_ctrl() - 4;
  const double s = std::clamp(t, 0.0, spline.duration()) / spline.dt();
  const int seg = std::min(static_cast<int>(std::floor(s)), last);
  return {seg, std::clamp(s - seg, 0.0, 1.0)};
}

Vec3 evaluate(const UniformBspline& spline, double t, int order) {
  const double T = spline.duration();
  const double tol = 1e-9 * std::max(1.0, T);
  if (!(t >= -tol && t <= T + tol)) throw DomainError("evaluation time outside [0, duration]");
  if (order < 0 || order > 3) throw DomainError("derivative order must be in 0..3");
  const auto [seg, u] = locate(spline, t);
  const Eigen::Vector4d w = basis_weights(u, order);
  Vec3 p = Vec3::Zero();
  for (int m = 0; m < 4; ++m) p += w[m] * spline.ctrl()[seg + m];
  return p / std::pow(spline.dt(), order);
}

std::vector<Vec3> sample_positions(const UniformBspline& spline, int count) {
  std::vector<Vec3> out;
  out.reserve(count);
  const double T = spline.duration();
  for (int i = 0; i < count; ++i) out.push_back(evaluate(spline, T * i / (count - 1)));
  return out;
}

std::array<Vec3, 3> boundary_ctrl(const State& s, double dt) {
  const Vec3 mid = s.pos - s.acc * dt * dt / 6.0;
  const Vec3 common = mid + s.acc * dt * dt / 2.0;
  return {common - s.vel * dt, mid, common + s.vel * dt};
}

UniformBspline pin_boundaries(const UniformBspline& spline, const State& start, const State& goal) {
  if (spline.num_ctrl() < 6) throw SizeError("pinning both boundaries needs N_c >= 6");
  auto ctrl = spline.ctrl();
  const auto head = boundary_ctrl(start, spline.dt());
  const auto tail = boundary_ctrl(goal, spline.dt());
  const std::size_t n = ctrl.size();
  for (std::size_t m = 0; m < 3; ++m) {
    ctrl[m] = head[m];
    ctrl[n - 3 + m] = tail[m];
  }
  return spline.with_ctrl(std::move(ctrl));
}

Path resample_polyline(const Path& waypoints, double max_spacing) {
  if (waypoints.empty()) return {};
  if (!(max_spacing > 0.0)) throw PreconditionError("resample spacing must be positive");
  Path out{waypoints.front()};
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Vec3 a = waypoints[i - 1];
    const Vec3 b = waypoints[i];
    const double len = (b - a).norm();
    if (len == 0.0) continue;
    const int parts = std::max(1, static_cast<int>(std::ceil(len / max_spacing - 1e-9)));
    for (int k = 1; k <= parts; ++k) out.push_back(a + (b - a) * (double(k) / parts));
  }
  return out;
}

UniformBspline fit_from_waypoints(const Path& waypoints, double dt, const State& start,
                                  const State& goal) {
  if (waypoints.size() < 2) throw SizeError("fitting needs at least 2 waypoints");
  if (!(dt > 0.0)) throw PreconditionError("knot interval must be positive");

  Path pts = waypoints;
  if (pts.size() < 6) {
    const double len = path_length(pts);
    pts = len > 0.0 ? resample_polyline(pts, len / 5.0) : Path(6, pts.front());
    while (pts.size() < 6) pts.push_back(pts.back());
  }

  const int k = static_cast<int>(pts.size());
  const int n = k + 2;
  std::vector<Vec3> ctrl(n, Vec3::Zero());
  const auto head = boundary_ctrl(start, dt);
  const auto tail = boundary_ctrl(goal, dt);
  for (int m = 0; m < 3; ++m) {
    ctrl[m] = head[m];
    ctrl[n - 3 + m] = tail[m];
  }

  // Unknowns Q_3..Q_{n-4}; one row per interior waypoint knot j: (Q_j + 4 Q_{j+1} + Q_{j+2}) / 6.
  const int unknowns = n - 6;
  const int rows = k - 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, unknowns);
  Eigen::MatrixXd rhs(rows, 3);
  const double w[3] = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  for (int r = 0; r < rows; ++r) {
    const int j = r + 1;
    Vec3 b = pts[j];
    for (int m = 0; m < 3; ++m) {
      const int q = j + m;
      if (q >= 3 && q <= n - 4) {
        a(r, q - 3) += w[m];
      } else {
        b -= w[m] * ctrl[q];
      }
    }
    rhs.row(r) = b.transpose();
  }
  const Eigen::MatrixXd sol = a.colPivHouseholderQr().solve(rhs);
  for (int u = 0; u < unknowns; ++u) ctrl[u + 3] = sol.row(u).transpose();
  return {std::move(ctrl), dt};
}

}  // namespace egoplan
