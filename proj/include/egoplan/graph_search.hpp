#pragma once

#include <cstddef>
#include <string_view>

#include "egoplan/grid_map.hpp"

namespace egoplan {

/// Guide path produced by a grid search.
struct SearchResult {
  Path path;                  ///< cell centers from start cell to goal cell
  double cost = 0.0;          ///< sum of Euclidean steps along `path`, meters
  std::size_t expanded = 0;   ///< nodes popped and expanded (both directions for bidirectional)
  double elapsed = 0.0;       ///< wall time, seconds
};

enum class SearchAlgorithm { kDijkstra, kAStar, kBidirectional };

std::string_view to_string(SearchAlgorithm algo);
/// Accepts "dijkstra", "astar", "bidirectional".
SearchAlgorithm parse_algorithm(std::string_view name);

// All searches use 26-connectivity with Euclidean step costs. Ties in the open
// list are broken by lower heuristic value, then by lower linear cell index.
// Start/goal in occupied cells throw PreconditionError; an unreachable goal
// throws NoPathError.

SearchResult dijkstra(const OccupancyGrid& grid, const Vec3& start, const Vec3& goal);
SearchResult astar(const OccupancyGrid& grid, const Vec3& start, const Vec3& goal);

/**
 * Bidirectional A* with front-to-back Euclidean heuristics.
 *
 * Each step expands the direction with the smaller open list (forward on
 * ties); a node already closed by the opposite search is closed without
 * expansion. The search stops once the best meeting cost mu satisfies
 * mu <= max(min forward f, min backward f); the path is stitched through the
 * meeting cell.
 */
SearchResult bidirectional_astar(const OccupancyGrid& grid, const Vec3& start, const Vec3& goal);

SearchResult run_search(SearchAlgorithm algo, const OccupancyGrid& grid, const Vec3& start,
                        const Vec3& goal);

/// Greedy line-of-sight shortcutting of a collision-free path.
Path prune_path(const SearchResult& result, const OccupancyGrid& grid);

/// Sum of Euclidean segment lengths.
double path_length(const Path& path);

}  // namespace egoplan
