#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoplan/types.hpp"

namespace egoplan {

/**
 * Dense voxel occupancy grid.
 *
 * Cell (i, j, k) covers [origin + (i,j,k) * res, origin + (i+1,j+1,k+1) * res).
 * Anything outside the grid reports occupied, which keeps searches and the
 * optimizer inside the known world without separate bound constraints.
 *
 * Grids are immutable once built; inflate() returns a new grid.
 */
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  /// Empty (all free) grid covering `bounds`; dims are rounded up to whole cells.
  OccupancyGrid(const Box& bounds, double resolution);

  double resolution() const { return resolution_; }
  const Vec3& origin() const { return origin_; }
  const Index3& dims() const { return dims_; }
  double inflation_radius() const { return inflation_radius_; }
  std::size_t cell_count() const { return occupancy_.size(); }
  Box bounds() const;

  bool in_bounds(const Index3& c) const {
    return c.x() >= 0 && c.y() >= 0 && c.z() >= 0 && c.x() < dims_.x() && c.y() < dims_.y() &&
           c.z() < dims_.z();
  }
  std::size_t linear_index(const Index3& c) const {
    return static_cast<std::size_t>(c.x()) +
           static_cast<std::size_t>(dims_.x()) *
               (static_cast<std::size_t>(c.y()) + static_cast<std::size_t>(dims_.y()) * c.z());
  }
  Index3 cell_of_index(std::size_t idx) const;

  Index3 world_to_cell(const Vec3& p) const;
  Vec3 cell_center(const Index3& c) const;

  bool occupied(const Index3& c) const { return !in_bounds(c) || occupancy_[linear_index(c)] != 0; }
  bool occupied(const Vec3& p) const { return occupied(world_to_cell(p)); }
  bool occupied_index(std::size_t idx) const { return occupancy_[idx] != 0; }

  std::size_t occupied_count() const;

  /// Marks a cell occupied; ignored outside the grid. Used by builders only.
  void set_occupied(const Index3& c, bool value = true);
  void set_inflation_radius(double r) { inflation_radius_ = r; }

  const std::vector<std::uint8_t>& raw() const { return occupancy_; }

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.resolution_ == b.resolution_ && a.origin_ == b.origin_ && a.dims_ == b.dims_ &&
           a.occupancy_ == b.occupancy_;
  }

 private:
  double resolution_ = 1.0;
  Vec3 origin_ = Vec3::Zero();
  Index3 dims_ = Index3::Zero();
  double inflation_radius_ = 0.0;
  std::vector<std::uint8_t> occupancy_;
};

/// Occupies exactly the cells containing at least one point; out-of-bounds points are dropped.
OccupancyGrid build_grid(std::span<const Vec3> points, double resolution, const Box& bounds);

/// A cell becomes occupied iff its center is within `radius` of an occupied cell center.
OccupancyGrid inflate(const OccupancyGrid& grid, double radius);

/**
 * Visits every cell the segment from -> to passes through, in order.
 *
 * The callback receives the cell and the segment parameter t in [0, 1] at
 * which the segment enters it (0 for the starting cell) and returns false to
 * stop the walk. Cells outside the grid are visited too.
 */
void traverse_cells(const OccupancyGrid& grid, const Vec3& from, const Vec3& to,
                    const std::function<bool(const Index3&, double)>& visit);

/// Point where the segment first enters an occupied cell, or nullopt if it stays free.
std::optional<Vec3> raycast(const OccupancyGrid& grid, const Vec3& from, const Vec3& to);

/// Vertical cylinder spanning the full world height.
struct Pillar {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
};

struct ForestParams {
  double radius_min = 0.2;
  double radius_max = 0.5;
  /// Pillars whose footprint comes within this distance of a keep-clear point are redrawn.
  double keep_clear_margin = 1.0;
};

/// Deterministic pillar layout; count = round(density * footprint area).
std::vector<Pillar> forest_pillars(std::uint64_t seed, double density, const Box& bounds,
                                   std::span<const Vec3> keep_clear = {},
                                   const ForestParams& params = {});

OccupancyGrid rasterize_pillars(std::span<const Pillar> pillars, const Box& bounds,
                                double resolution);

OccupancyGrid random_forest(std::uint64_t seed, double density, const Box& bounds,
                            double resolution, std::span<const Vec3> keep_clear = {},
                            const ForestParams& params = {});

/// Axis-aligned solid boxes rasterized by cell-center containment.
OccupancyGrid rasterize_boxes(std::span<const Box> boxes, const Box& bounds, double resolution);

/// Cells are occupied independently with `probability`, using the cell order x fastest.
OccupancyGrid random_cells(std::uint64_t seed, double probability, const Box& bounds,
                           double resolution);

/// Reads "x y z" triples, one per line. Blank lines and lines starting with '#' are skipped.
std::vector<Vec3> read_xyz(const std::string& path);

/// Uniform double in [0, 1) from a 64-bit Mersenne twister draw; stable across standard libraries.
double unit_uniform(std::uint64_t draw);

}  // namespace egoplan
