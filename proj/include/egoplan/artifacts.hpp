#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "egoplan/bspline.hpp"
#include "egoplan/grid_map.hpp"

namespace egoplan {

/**
 * Heading of the planar velocity at t.
 *
 * When the planar speed is below 1e-6 m/s the heading is undefined and `held`
 * is returned; callers sampling in time pass the previous yaw.
 */
double yaw_from_velocity(const UniformBspline& spline, double t, double held = 0.0);

inline constexpr double kTrajectoryStep = 1e-2;

/// Header t,x,y,z,vx,vy,vz,ax,ay,az,yaw; rows every 0.01 s from 0 through the duration.
void write_trajectory_csv(std::ostream& out, const UniformBspline& spline);

/// Header x,y,z; one row per vertex.
void write_path_csv(std::ostream& out, const Path& path);

/// Reads the x, y, z columns (located by header name) of a trajectory or path CSV.
Path read_points_csv(const std::filesystem::path& path);

/// Writes `text` to `path`, throwing IoError when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

struct RenderInput {
  const OccupancyGrid* grid = nullptr;  ///< obstacles; one square per occupied (x, y) column
  Path guide;
  Path phi_s;  ///< sampled positions
  Path phi_f;
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
};

/// Top-down SVG; obstacle squares carry class="obstacle". Output depends only on the input.
std::string render_svg(const RenderInput& input);

/// Number of (x, y) columns with at least one occupied cell.
std::size_t occupied_columns(const OccupancyGrid& grid);

}  // namespace egoplan
