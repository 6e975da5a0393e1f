#include "egoplan/graph_search.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

namespace egoplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kNoParent = -1;

struct Neighbor {
  Index3 offset;
  double length;  // in cells
};

const std::array<Neighbor, 26>& neighbors() {
  static const std::array<Neighbor, 26> table = [] {
    std::array<Neighbor, 26> t{};
    std::size_t n = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          t[n++] = {Index3(dx, dy, dz), std::sqrt(double(dx * dx + dy * dy + dz * dz))};
        }
    return t;
  }();
  return table;
}

struct OpenEntry {
  double f;
  double h;
  std::size_t index;
  double g;
};

// Min-heap order: f, then h, then cell index.
struct WorseThan {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.index > b.index;
  }
};

using OpenList = std::priority_queue<OpenEntry, std::vector<OpenEntry>, WorseThan>;

/// One search direction: g-values, parents and closed flags over the whole grid.
class Frontier {
 public:
  Frontier(const OccupancyGrid& grid, std::size_t root, const Vec3& target, bool use_heuristic)
      : grid_(grid),
        target_(target),
        use_heuristic_(use_heuristic),
        g_(grid.cell_count(), kInf),
        parent_(grid.cell_count(), kNoParent),
        closed_(grid.cell_count(), 0) {
    g_[root] = 0.0;
    const double h = heuristic(grid.cell_of_index(root));
    open_.push({h, h, root, 0.0});
  }

  double heuristic(const Index3& c) const {
    if (!use_heuristic_) return 0.0;
    return (grid_.cell_center(c) - target_).norm();
  }

  /// Drops stale and closed entries from the top of the heap.
  void prune() {
    while (!open_.empty()) {
      const auto& top = open_.top();
      if (closed_[top.index] || top.g != g_[top.index]) {
        open_.pop();
        continue;
      }
      break;
    }
  }

  bool empty() {
    prune();
    return open_.empty();
  }
  std::size_t open_size() const { return open_.size(); }
  double min_f() {
    prune();
    return open_.empty() ? kInf : open_.top().f;
  }

  /// Pops the best node and closes it without expanding; returns its index.
  std::size_t close_top() {
    prune();
    const std::size_t idx = open_.top().index;
    open_.pop();
    closed_[idx] = 1;
    return idx;
  }

  std::size_t top_index() {
    prune();
    return open_.top().index;
  }

  bool closed(std::size_t idx) const { return closed_[idx] != 0; }

  /// Pops and expands the best node; calls on_improve(idx) for each neighbor whose g improved.
  template <typename OnImprove>
  std::size_t expand(OnImprove&& on_improve) {
    prune();
    const OpenEntry cur = open_.top();
    open_.pop();
    closed_[cur.index] = 1;
    const Index3 c = grid_.cell_of_index(cur.index);
    const double res = grid_.resolution();
    for (const auto& nb : neighbors()) {
      const Index3 n = c + nb.offset;
      if (grid_.occupied(n)) continue;
      const std::size_t ni = grid_.linear_index(n);
      if (closed_[ni]) continue;
      const double g = cur.g + nb.length * res;
      if (g < g_[ni]) {
        g_[ni] = g;
        parent_[ni] = static_cast<std::int64_t>(cur.index);
        const double h = heuristic(n);
        open_.push({g + h, h, ni, g});
        on_improve(ni);
      }
    }
    return cur.index;
  }

  double g(std::size_t idx) const { return g_[idx]; }

  /// Cell indices from `idx` back to the root, inclusive.
  std::vector<std::size_t> chain(std::size_t idx) const {
    std::vector<std::size_t> out;
    for (std::int64_t i = static_cast<std::int64_t>(idx); i != kNoParent; i = parent_[i])
      out.push_back(static_cast<std::size_t>(i));
    return out;
  }

 private:
  const OccupancyGrid& grid_;
  Vec3 target_;
  bool use_heuristic_;
  std::vector<double> g_;
  std::vector<std::int64_t> parent_;
  std::vector<std::uint8_t> closed_;
  OpenList open_;
};

struct Endpoints {
  std::size_t start;
  std::size_t goal;
  Vec3 start_center;
  Vec3 goal_center;
};

Endpoints resolve_endpoints(const OccupancyGrid& grid, const Vec3& start, const Vec3& goal) {
  const Index3 s = grid.world_to_cell(start);
  const Index3 g = grid.world_to_cell(goal);
  if (grid.occupied(s)) throw PreconditionError("search start lies in an occupied cell");
  if (grid.occupied(g)) throw PreconditionError("search goal lies in an occupied cell");
  return {grid.linear_index(s), grid.linear_index(g), grid.cell_center(s), grid.cell_center(g)};
}

void finish(SearchResult& r, const OccupancyGrid& grid, const std::vector<std::size_t>& cells,
            std::chrono::steady_clock::time_point t0) {
  r.path.clear();
  r.path.reserve(cells.size());
  for (auto idx : cells) r.path.push_back(grid.cell_center(grid.cell_of_index(idx)));
  r.cost = path_length(r.path);
  r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SearchResult unidirectional(const OccupancyGrid& grid, const Vec3& start, const Vec3& goal,
                            bool use_heuristic) {
  const auto t0 = std::chrono::steady_clock::now();
  const Endpoints ep = resolve_endpoints(grid, start, goal);
  SearchResult result;
  Frontier fwd(grid, ep.start, ep.goal_center, use_heuristic);
  while (!fwd.empty()) {
    const std::size_t cur = fwd.expand([](std::size_t) {});
    ++result.expanded;
    if (cur == ep.goal) {
      auto cells = fwd.chain(ep.goal);
      std::reverse(cells.begin(), cells.end());
      finish(result, grid, cells, t0);
      return result;
    }
  }
  throw NoPathError("goal is unreachable from start");
}

}  // namespace

std::string_view to_string(SearchAlgorithm algo) {
  switch (algo) {
    case SearchAlgorithm::kDijkstra:
      return "dijkstra";
    case SearchAlgorithm::kAStar:
      return "astar";
    case SearchAlgorithm::kBidirectional:
      return "bidirectional";
  }
  return "unknown";
}

SearchAlgorithm parse_algorithm(std::string_view name) {
  if (name == "dijkstra") return SearchAlgorithm::kDijkstra;
  if (name == "astar") return SearchAlgorithm::kAStar;
  if (name == "bidirectional") return SearchAlgorithm::kBidirectional;
  throw InvalidInput("unknown search algorithm: " + std::string(name));
}

double path_length(const Path& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

SearchResult dijkstra(const OccupancyGrid& grid, const Vec3& start, const Vec3& goal) {
  return unidirectional(grid, start, goal, false);
}

SearchResult astar(const OccupancyGrid& grid, const Vec3& start, const Vec3& goal) {
  return unidirectional(grid, start, goal, true);
}

SearchResult bidirectional_astar(const OccupancyGrid& grid, const Vec3& start, const Vec3& goal) {
  const auto t0 = std::chrono::steady_clock::now();
  const Endpoints ep = resolve_endpoints(grid, start, goal);
  SearchResult result;
  if (ep.start == ep.goal) {
    ++result.expanded;
    finish(result, grid, {ep.start}, t0);
    return result;
  }

  Frontier fwd(grid, ep.start, ep.goal_center, true);
  Frontier bwd(grid, ep.goal, ep.start_center, true);
  double mu = kInf;
  std::size_t meet = 0;
  bool met = false;

  auto update_meeting = [&](std::size_t idx) {
    const double total = fwd.g(idx) + bwd.g(idx);
    // Strict improvement, or an equal cost at a lower index, keeps the pick deterministic.
    if (total < mu || (total == mu && met && idx < meet)) {
      mu = total;
      meet = idx;
      met = true;
    }
  };

  while (!fwd.empty() && !bwd.empty()) {
    // The slack absorbs rounding on the plateau of f == mu; cost error stays below it.
    if (met && mu <= std::max(fwd.min_f(), bwd.min_f()) + 1e-12 * std::max(1.0, mu)) break;
    Frontier& side = fwd.open_size() <= bwd.open_size() ? fwd : bwd;
    const Frontier& other = &side == &fwd ? bwd : fwd;
    // A node the other search already closed contributes only through the
    // meeting cost recorded when it was reached, so it is not expanded again.
    if (other.closed(side.top_index())) {
      side.close_top();
      continue;
    }
    side.expand(update_meeting);
    ++result.expanded;
  }
  if (!met) throw NoPathError("goal is unreachable from start");

  auto cells = fwd.chain(meet);
  std::reverse(cells.begin(), cells.end());
  const auto tail = bwd.chain(meet);
  cells.insert(cells.end(), tail.begin() + 1, tail.end());
  finish(result, grid, cells, t0);
  return result;
}

SearchResult run_search(SearchAlgorithm algo, const OccupancyGrid& grid, const Vec3& start,
                        const Vec3& goal) {
  switch (algo) {
    case SearchAlgorithm::kDijkstra:
      return dijkstra(grid, start, goal);
    case SearchAlgorithm::kAStar:
      return astar(grid, start, goal);
    case SearchAlgorithm::kBidirectional:
      return bidirectional_astar(grid, start, goal);
  }
  throw InvalidInput("unknown search algorithm");
}

Path prune_path(const SearchResult& result, const OccupancyGrid& grid) {
  const Path& in = result.path;
  if (in.size() <= 2) return in;
  auto blocked = [&](const Vec3& a, const Vec3& b) { return raycast(grid, a, b).has_value(); };
  Path out{in.front()};
  for (std::size_t j = 1; j + 1 < in.size(); ++j) {
    if (blocked(out.back(), in[j + 1])) out.push_back(in[j]);
  }
  out.push_back(in.back());
  return out;
}

}  // namespace egoplan
