#include "egoplan/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace egoplan {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  // Avoid "-0.000000" so equal values print identically.
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string num(double v) { return fmt("%.6f", v); }

std::vector<char> column_mask(const OccupancyGrid& grid) {
  const Index3 d = grid.dims();
  std::vector<char> mask(static_cast<std::size_t>(d.x()) * d.y(), 0);
  for (int k = 0; k < d.z(); ++k)
    for (int j = 0; j < d.y(); ++j)
      for (int i = 0; i < d.x(); ++i)
        if (grid.occupied(Index3(i, j, k))) mask[static_cast<std::size_t>(j) * d.x() + i] = 1;
  return mask;
}

}  // namespace

double yaw_from_velocity(const UniformBspline& spline, double t, double held) {
  const Vec3 v = evaluate(spline, t, 1);
  if (std::hypot(v.x(), v.y()) < 1e-6) return held;
  return std::atan2(v.y(), v.x());
}

void write_trajectory_csv(std::ostream& out, const UniformBspline& spline) {
  out << "t,x,y,z,vx,vy,vz,ax,ay,az,yaw\n";
  const double T = spline.duration();
  const long steps = static_cast<long>(std::floor(T / kTrajectoryStep + 1e-9));
  double yaw = 0.0;
  for (long k = 0; k <= steps; ++k) {
    const double t = std::min(k * kTrajectoryStep, T);
    const Vec3 p = evaluate(spline, t, 0), v = evaluate(spline, t, 1), a = evaluate(spline, t, 2);
    yaw = yaw_from_velocity(spline, t, yaw);
    out << fmt("%.2f", t);
    for (const Vec3* x : {&p, &v, &a})
      for (int r = 0; r < 3; ++r) out << ',' << num((*x)[r]);
    out << ',' << num(yaw) << '\n';
  }
}

void write_path_csv(std::ostream& out, const Path& path) {
  out << "x,y,z\n";
  for (const auto& p : path) out << num(p.x()) << ',' << num(p.y()) << ',' << num(p.z()) << '\n';
}

Path read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path.string() + " is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int cols[3] = {-1, -1, -1};
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "x") cols[0] = static_cast<int>(c);
    if (header[c] == "y") cols[1] = static_cast<int>(c);
    if (header[c] == "z") cols[2] = static_cast<int>(c);
  }
  if (cols[0] < 0 || cols[1] < 0 || cols[2] < 0)
    throw InvalidInput(path.string() + " lacks x, y, z columns");
  Path out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    Vec3 p;
    for (int r = 0; r < 3; ++r) {
      if (cols[r] >= static_cast<int>(cells.size())) throw InvalidInput("short row in " + path.string());
      try {
        p[r] = std::stod(cells[cols[r]]);
      } catch (const std::exception&) {
        throw InvalidInput("bad number in " + path.string());
      }
    }
    out.push_back(p);
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::size_t occupied_columns(const OccupancyGrid& grid) {
  std::size_t n = 0;
  for (char c : column_mask(grid)) n += c != 0;
  return n;
}

std::string render_svg(const RenderInput& in) {
  if (in.grid == nullptr) throw PreconditionError("render needs a grid");
  const OccupancyGrid& g = *in.grid;
  const double res = g.resolution();
  const Index3 d = g.dims();
  const double scale = 40.0;  // pixels per meter
  const double width = d.x() * res * scale, height = d.y() * res * scale;
  // World y grows upward; SVG y grows downward.
  auto px = [&](double x) { return num((x - g.origin().x()) * scale); };
  auto py = [&](double y) { return num(height - (y - g.origin().y()) * scale); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
    << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
    << "\" fill=\"#ffffff\"/>\n";
  const auto mask = column_mask(g);
  const std::string side = num(res * scale);
  for (int j = 0; j < d.y(); ++j) {
    for (int i = 0; i < d.x(); ++i) {
      if (!mask[static_cast<std::size_t>(j) * d.x() + i]) continue;
      const double x = g.origin().x() + i * res, y = g.origin().y() + (j + 1) * res;
      s << "<rect class=\"obstacle\" x=\"" << px(x) << "\" y=\"" << py(y) << "\" width=\"" << side
        << "\" height=\"" << side << "\" fill=\"#555555\"/>\n";
    }
  }
  auto polyline = [&](const Path& pts, const char* cls, const char* stroke, const char* extra) {
    if (pts.empty()) return;
    s << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << stroke
      << "\" stroke-width=\"2\"" << extra << " points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k) s << ' ';
      s << px(pts[k].x()) << ',' << py(pts[k].y());
    }
    s << "\"/>\n";
  };
  polyline(in.guide, "guide", "#2a9d8f", " stroke-dasharray=\"6 4\"");
  polyline(in.phi_s, "phi_s", "#e9c46a", "");
  polyline(in.phi_f, "phi_f", "#d62828", "");
  auto marker = [&](const Vec3& p, const char* cls, const char* fill) {
    s << "<circle class=\"" << cls << "\" cx=\"" << px(p.x()) << "\" cy=\"" << py(p.y())
      << "\" r=\"6\" fill=\"" << fill << "\"/>\n";
  };
  marker(in.start, "start", "#1d3557");
  marker(in.goal, "goal", "#e76f51");
  s << "</svg>\n";
  return s.str();
}

}  // namespace egoplan
