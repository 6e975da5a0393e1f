#include "egoplan/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace egoplan {

namespace {

int cells_along(double extent, double resolution) {
  const double n = extent / resolution;
  // 20 / 0.1 must give 200 cells, not 201.
  const double rounded = std::round(n);
  if (std::abs(n - rounded) < 1e-9 * std::max(1.0, n)) return static_cast<int>(rounded);
  return static_cast<int>(std::ceil(n));
}

void check_grid_args(const Box& bounds, double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw PreconditionError("grid resolution must be positive");
  if (!bounds.min.allFinite() || !bounds.max.allFinite() ||
      !(bounds.max.array() > bounds.min.array()).all())
    throw PreconditionError("grid bounds are degenerate");
}

}  // namespace

double unit_uniform(std::uint64_t draw) { return static_cast<double>(draw >> 11) * 0x1.0p-53; }

OccupancyGrid::OccupancyGrid(const Box& bounds, double resolution) {
  check_grid_args(bounds, resolution);
  resolution_ = resolution;
  origin_ = bounds.min;
  const Vec3 ext = bounds.extent();
  dims_ = Index3(cells_along(ext.x(), resolution), cells_along(ext.y(), resolution),
                 cells_along(ext.z(), resolution));
  occupancy_.assign(static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z(), 0);
}

Box OccupancyGrid::bounds() const {
  return {origin_, origin_ + dims_.cast<double>() * resolution_};
}

Index3 OccupancyGrid::cell_of_index(std::size_t idx) const {
  const auto nx = static_cast<std::size_t>(dims_.x());
  const auto ny = static_cast<std::size_t>(dims_.y());
  return Index3(static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
                static_cast<int>(idx / (nx * ny)));
}

Index3 OccupancyGrid::world_to_cell(const Vec3& p) const {
  Index3 c;
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - origin_[a]) / resolution_);
    // Far-away or non-finite points collapse to an out-of-bounds index.
    c[a] = std::isfinite(f) ? static_cast<int>(std::clamp(f, -1e9, 1e9)) : -1;
  }
  return c;
}

Vec3 OccupancyGrid::cell_center(const Index3& c) const {
  return origin_ + (c.cast<double>().array() + 0.5).matrix() * resolution_;
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), 1));
}

void OccupancyGrid::set_occupied(const Index3& c, bool value) {
  if (in_bounds(c)) occupancy_[linear_index(c)] = value ? 1 : 0;
}

OccupancyGrid build_grid(std::span<const Vec3> points, double resolution, const Box& bounds) {
  for (const auto& p : points) {
    if (!p.allFinite()) throw InvalidInput("point list contains a non-finite coordinate");
  }
  OccupancyGrid grid(bounds, resolution);
  for (const auto& p : points) {
    if (!bounds.contains(p)) continue;
    grid.set_occupied(grid.world_to_cell(p));
  }
  return grid;
}

OccupancyGrid inflate(const OccupancyGrid& grid, double radius) {
  if (!(radius >= 0.0)) throw PreconditionError("inflation radius must be non-negative");
  OccupancyGrid out = grid;
  out.set_inflation_radius(grid.inflation_radius() + radius);
  const double res = grid.resolution();
  const int reach = static_cast<int>(std::floor(radius / res + 1e-9));
  if (reach == 0) return out;

  const double limit = (radius / res) * (radius / res) + 1e-9;
  std::vector<Index3> stencil;
  for (int dz = -reach; dz <= reach; ++dz)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        if (dx * dx + dy * dy + dz * dz <= limit) stencil.emplace_back(dx, dy, dz);
      }

  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    if (!grid.occupied_index(i)) continue;
    const Index3 c = grid.cell_of_index(i);
    for (const auto& off : stencil) out.set_occupied(c + off);
  }
  return out;
}

void traverse_cells(const OccupancyGrid& grid, const Vec3& from, const Vec3& to,
                    const std::function<bool(const Index3&, double)>& visit) {
  const Vec3 d = to - from;
  Index3 cell = grid.world_to_cell(from);
  if (!visit(cell, 0.0)) return;

  const double res = grid.resolution();
  const Vec3& origin = grid.origin();
  Index3 step = Index3::Zero();
  for (int a = 0; a < 3; ++a) step[a] = d[a] > 0.0 ? 1 : (d[a] < 0.0 ? -1 : 0);

  // Parameter at which the segment crosses the next face along `a`.
  auto next_crossing = [&](int a) {
    if (step[a] == 0) return std::numeric_limits<double>::infinity();
    const double face = origin[a] + (cell[a] + (step[a] > 0 ? 1 : 0)) * res;
    return (face - from[a]) / d[a];
  };

  Vec3 t_max(next_crossing(0), next_crossing(1), next_crossing(2));
  for (;;) {
    const double t = t_max.minCoeff();
    if (!(t <= 1.0)) return;
    // A segment through an edge or corner only touches the side cells, so
    // every axis crossing at the same parameter steps together.
    const double tie = 1e-12 * std::max(1.0, std::abs(t));
    for (int a = 0; a < 3; ++a) {
      if (t_max[a] - t <= tie) cell[a] += step[a];
    }
    for (int a = 0; a < 3; ++a) {
      if (t_max[a] - t <= tie) t_max[a] = next_crossing(a);
    }
    if (!visit(cell, std::max(t, 0.0))) return;
  }
}

std::optional<Vec3> raycast(const OccupancyGrid& grid, const Vec3& from, const Vec3& to) {
  if (grid.occupied(from)) throw PreconditionError("raycast origin lies in an occupied cell");
  std::optional<Vec3> hit;
  bool first = true;
  traverse_cells(grid, from, to, [&](const Index3& c, double t) {
    if (first) {
      first = false;
      return true;
    }
    if (grid.occupied(c)) {
      hit = from + t * (to - from);
      return false;
    }
    return true;
  });
  return hit;
}

std::vector<Pillar> forest_pillars(std::uint64_t seed, double density, const Box& bounds,
                                   std::span<const Vec3> keep_clear, const ForestParams& params) {
  if (!(density >= 0.0)) throw PreconditionError("forest density must be non-negative");
  const Vec3 ext = bounds.extent();
  const auto count = static_cast<std::size_t>(std::llround(density * ext.x() * ext.y()));
  std::mt19937_64 rng(seed);
  std::vector<Pillar> pillars;
  pillars.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Pillar p;
      p.x = bounds.min.x() + unit_uniform(rng()) * ext.x();
      p.y = bounds.min.y() + unit_uniform(rng()) * ext.y();
      p.radius = params.radius_min + unit_uniform(rng()) * (params.radius_max - params.radius_min);
      const bool blocks = std::any_of(keep_clear.begin(), keep_clear.end(), [&](const Vec3& q) {
        return std::hypot(q.x() - p.x, q.y() - p.y) < p.radius + params.keep_clear_margin;
      });
      if (!blocks) {
        pillars.push_back(p);
        break;
      }
    }
  }
  return pillars;
}

OccupancyGrid rasterize_pillars(std::span<const Pillar> pillars, const Box& bounds,
                                double resolution) {
  OccupancyGrid grid(bounds, resolution);
  const Index3 dims = grid.dims();
  for (const auto& p : pillars) {
    const Index3 lo = grid.world_to_cell(Vec3(p.x - p.radius, p.y - p.radius, bounds.min.z()));
    const Index3 hi = grid.world_to_cell(Vec3(p.x + p.radius, p.y + p.radius, bounds.min.z()));
    for (int j = std::max(lo.y(), 0); j <= std::min(hi.y(), dims.y() - 1); ++j)
      for (int i = std::max(lo.x(), 0); i <= std::min(hi.x(), dims.x() - 1); ++i) {
        const Vec3 c = grid.cell_center(Index3(i, j, 0));
        if (std::hypot(c.x() - p.x, c.y() - p.y) > p.radius) continue;
        for (int k = 0; k < dims.z(); ++k) grid.set_occupied(Index3(i, j, k));
      }
  }
  return grid;
}

OccupancyGrid random_forest(std::uint64_t seed, double density, const Box& bounds,
                            double resolution, std::span<const Vec3> keep_clear,
                            const ForestParams& params) {
  const auto pillars = forest_pillars(seed, density, bounds, keep_clear, params);
  return rasterize_pillars(pillars, bounds, resolution);
}

OccupancyGrid rasterize_boxes(std::span<const Box> boxes, const Box& bounds, double resolution) {
  OccupancyGrid grid(bounds, resolution);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const Index3 c = grid.cell_of_index(i);
    const Vec3 center = grid.cell_center(c);
    for (const auto& b : boxes) {
      if (b.contains(center)) {
        grid.set_occupied(c);
        break;
      }
    }
  }
  return grid;
}

OccupancyGrid random_cells(std::uint64_t seed, double probability, const Box& bounds,
                           double resolution) {
  OccupancyGrid grid(bounds, resolution);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    if (unit_uniform(rng()) < probability) grid.set_occupied(grid.cell_of_index(i));
  }
  return grid;
}

std::vector<Vec3> read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open point file: " + path);
  std::vector<Vec3> points;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Vec3 p;
    std::string extra;
    if (!(ss >> p.x() >> p.y() >> p.z()) || (ss >> extra))
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected 'x y z'");
    if (!p.allFinite())
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": non-finite coordinate");
    points.push_back(p);
  }
  return points;
}

}  // namespace egoplan
