#pragma once

#include <optional>
#include <vector>

#include "egoplan/bspline.hpp"
#include "egoplan/grid_map.hpp"

namespace egoplan {

/// Obstacle-surface point p and unit repulsion direction v for one control point.
struct AnchorPair {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::UnitX();
};

/// Anchor pairs keyed by control-point index.
class AnchorSet {
 public:
  AnchorSet() = default;
  explicit AnchorSet(int num_ctrl) : pairs_(num_ctrl) {}

  int num_ctrl() const { return static_cast<int>(pairs_.size()); }
  const std::vector<AnchorPair>& at(int i) const { return pairs_[i]; }
  std::size_t total() const;

  /**
   * Adds `pair` to index i unless the list is full or an existing direction
   * is within `dedup_deg` degrees. Returns whether it was added.
   */
  bool add(int i, const AnchorPair& pair, int cap = 8, double dedup_deg = 10.0);

  void clear(int i) { pairs_.at(static_cast<std::size_t>(i)).clear(); }

 private:
  std::vector<std::vector<AnchorPair>> pairs_;
};

/// Inclusive run of control-point indices.
struct IndexRange {
  int first = 0;
  int last = 0;
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/**
 * Curve sample times strictly between the Greville times of i and i + 1.
 *
 * Samples are evenly spaced at most half a cell apart, measured by the control
 * polygon leg |Q_{i+1} - Q_i|; a short leg gets the single midpoint.
 */
std::vector<double> span_sample_times(const UniformBspline& spline, int i, double resolution);

/**
 * Maximal runs of consecutive control points in collision.
 *
 * Index i is flagged when Q_i is in an occupied cell or the curve between the
 * Greville times of i and a neighbor touches an occupied cell, checked by
 * walking the chords between consecutive span samples.
 */
std::vector<IndexRange> find_collision_segments(const UniformBspline& spline,
                                                const OccupancyGrid& grid);

/// Q_i when occupied, else the occupied curve point in an adjacent span nearest to Q_i's curve point.
std::optional<Vec3> collision_probe(const UniformBspline& spline, const OccupancyGrid& grid, int i);

/// No crossing of the guide with the control point's normal plane.
class NoCrossingError : public Error {
 public:
  using Error::Error;
};

/// The crossing point coincides with the control point.
class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

/// First point where the guide polyline crosses the plane through q with normal `normal`.
Vec3 guide_plane_crossing(const Vec3& q, const Path& guide, const Vec3& normal);

/// Closest point on the guide polyline to q.
Vec3 nearest_on_guide(const Vec3& q, const Path& guide);

/**
 * Anchor pair for an in-collision point q, aimed at `target` on the guide.
 *
 * v points from q to target; p is the last exit from occupied space along
 * that segment. Throws PreconditionError if q is free or no exit exists.
 */
AnchorPair anchor_toward(const Vec3& q, const Vec3& target, const OccupancyGrid& grid);

/// anchor_toward() the crossing of `guide` with the plane through q normal to `tangent`.
AnchorPair generate_anchor(const Vec3& q, const Path& guide, const Vec3& tangent,
                           const OccupancyGrid& grid);

/// Plane distance (q - p) . v; negative on the obstacle side.
inline double signed_dist(const Vec3& q, const AnchorPair& pair) { return (q - pair.p).dot(pair.v); }

/// Unit tangent of the spline at control point i (central difference fallback at rest).
Vec3 ctrl_tangent(const UniformBspline& spline, int i);

}  // namespace egoplan
