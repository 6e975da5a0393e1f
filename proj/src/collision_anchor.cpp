#include "egoplan/collision_anchor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace egoplan {

std::size_t AnchorSet::total() const {
  std::size_t n = 0;
  for (const auto& l : pairs_) n += l.size();
  return n;
}

bool AnchorSet::add(int i, const AnchorPair& pair, int cap, double dedup_deg) {
  auto& list = pairs_.at(static_cast<std::size_t>(i));
  if (static_cast<int>(list.size()) >= cap) return false;
  const double cos_limit = std::cos(dedup_deg * std::numbers::pi / 180.0);
  for (const auto& existing : list) {
    if (existing.v.dot(pair.v) > cos_limit) return false;
  }
  list.push_back(pair);
  return true;
}

std::vector<double> span_sample_times(const UniformBspline& spline, int i, double resolution) {
  const double a = spline.greville_time(i);
  const double b = spline.greville_time(i + 1);
  if (b <= a) return {};
  const double leg = (spline.ctrl()[i + 1] - spline.ctrl()[i]).norm();
  const int n = std::clamp(static_cast<int>(std::ceil(leg / (0.5 * resolution))), 1, 64);
  std::vector<double> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * (k + 0.5) / n);
  return out;
}

namespace {

/// Occupied point on the curve between Greville times of i and i + 1 closest in time to `t_ref`.
/// Chords between consecutive span samples are walked cell by cell.
std::optional<Vec3> span_probe(const UniformBspline& spline, const OccupancyGrid& grid, int i,
                               double t_ref) {
  std::vector<double> times{spline.greville_time(i)};
  for (double t : span_sample_times(spline, i, grid.resolution())) times.push_back(t);
  times.push_back(spline.greville_time(i + 1));
  if (times.back() < t_ref) std::reverse(times.begin(), times.end());
  std::optional<Vec3> hit;
  for (std::size_t k = 0; k + 1 < times.size() && !hit; ++k) {
    const Vec3 a = evaluate(spline, times[k]);
    const Vec3 b = evaluate(spline, times[k + 1]);
    if (grid.occupied(a)) {
      hit = a;
      break;
    }
    if ((b - a).norm() < 1e-12) continue;
    const Vec3 dir = (b - a).normalized();
    traverse_cells(grid, a, b, [&](const Index3& c, double t) {
      if (!grid.occupied(c)) return true;
      // Entry point nudged inside the cell so point lookups agree with the cell walk.
      Vec3 p = a + t * (b - a);
      for (double nudge = 1e-9; !grid.occupied(p) && nudge < 1e-3; nudge *= 10) p += nudge * dir;
      hit = p;
      return false;
    });
  }
  return hit;
}

}  // namespace

std::vector<IndexRange> find_collision_segments(const UniformBspline& spline,
                                                const OccupancyGrid& grid) {
  const int n = spline.num_ctrl();
  std::vector<char> flagged(n, 0);
  for (int i = 0; i < n; ++i) {
    if (grid.occupied(spline.ctrl()[i])) flagged[i] = 1;
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (span_probe(spline, grid, i, spline.greville_time(i))) flagged[i] = flagged[i + 1] = 1;
  }
  std::vector<IndexRange> ranges;
  for (int i = 0; i < n; ++i) {
    if (!flagged[i]) continue;
    if (!ranges.empty() && ranges.back().last == i - 1) {
      ranges.back().last = i;
    } else {
      ranges.push_back({i, i});
    }
  }
  return ranges;
}

std::optional<Vec3> collision_probe(const UniformBspline& spline, const OccupancyGrid& grid,
                                    int i) {
  const Vec3& q = spline.ctrl()[i];
  if (grid.occupied(q)) return q;
  const double gi = spline.greville_time(i);
  std::optional<Vec3> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int span : {i - 1, i}) {
    if (span < 0 || span + 1 >= spline.num_ctrl()) continue;
    const auto p = span_probe(spline, grid, span, gi);
    if (!p) continue;
    // Distance along the curve is approximated by distance to the curve point at gi.
    const double gap = (*p - evaluate(spline, gi)).norm();
    if (gap < best_gap) {
      best = p;
      best_gap = gap;
    }
  }
  return best;
}

Vec3 guide_plane_crossing(const Vec3& q, const Path& guide, const Vec3& normal) {
  auto side = [&](const Vec3& x) { return (x - q).dot(normal); };
  for (std::size_t i = 0; i < guide.size(); ++i) {
    const double fa = side(guide[i]);
    if (fa == 0.0) return guide[i];
    if (i + 1 == guide.size()) break;
    const double fb = side(guide[i + 1]);
    if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
      const double s = fa / (fa - fb);
      return guide[i] + s * (guide[i + 1] - guide[i]);
    }
  }
  throw NoCrossingError("guide path never crosses the control point's normal plane");
}

Vec3 nearest_on_guide(const Vec3& q, const Path& guide) {
  if (guide.empty()) throw PreconditionError("guide path is empty");
  Vec3 best = guide.front();
  double best_d2 = (q - best).squaredNorm();
  for (std::size_t i = 0; i + 1 < guide.size(); ++i) {
    const Vec3 ab = guide[i + 1] - guide[i];
    const double len2 = ab.squaredNorm();
    const double s = len2 > 0.0 ? std::clamp((q - guide[i]).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec3 c = guide[i] + s * ab;
    const double d2 = (q - c).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

AnchorPair anchor_toward(const Vec3& q, const Vec3& target, const OccupancyGrid& grid) {
  const Vec3 d = target - q;
  const double len = d.norm();
  if (len < 1e-9) throw DegenerateDirectionError("anchor target coincides with control point");
  if (!grid.occupied(q)) throw PreconditionError("anchor source is not in collision");

  bool prev_occupied = true;
  double exit_t = -1.0;
  traverse_cells(grid, q, target, [&](const Index3& c, double t) {
    const bool occ = grid.occupied(c);
    if (prev_occupied && !occ) exit_t = t;
    prev_occupied = occ;
    return true;
  });
  if (exit_t < 0.0) throw PreconditionError("no exit from occupied space toward the guide");
  return {q + exit_t * d, d / len};
}

AnchorPair generate_anchor(const Vec3& q, const Path& guide, const Vec3& tangent,
                           const OccupancyGrid& grid) {
  if (!(tangent.norm() > 0.0)) throw PreconditionError("tangent must be non-zero");
  const Vec3 s = guide_plane_crossing(q, guide, tangent);
  if ((s - q).norm() < 1e-9) throw DegenerateDirectionError("guide crossing coincides with point");
  return anchor_toward(q, s, grid);
}

Vec3 ctrl_tangent(const UniformBspline& spline, int i) {
  Vec3 t = evaluate(spline, spline.greville_time(i), 1);
  if (t.norm() < 1e-9) {
    const auto& q = spline.ctrl();
    const int lo = std::max(i - 1, 0);
    const int hi = std::min(i + 1, spline.num_ctrl() - 1);
    t = q[hi] - q[lo];
  }
  if (t.norm() < 1e-12) return Vec3::UnitX();
  return t.normalized();
}

}  // namespace egoplan
