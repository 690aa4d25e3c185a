#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hexplore/geometry.hpp"
#include "hexplore/mapping.hpp"

namespace hexplore {

/// Known-free cells whose centre is at least `robot_radius` away from every occupied cell centre.
class Traversability {
 public:
  Traversability(const OccupancyGrid& map, double robot_radius);

  const GridGeometry& geometry() const { return geometry_; }
  double robot_radius() const { return robot_radius_; }
  bool ok(const Cell& c) const { return geometry_.contains(c) && mask_[geometry_.index(c)] != 0; }
  bool ok(std::size_t idx) const { return mask_[idx] != 0; }

  /// Closest traversable cell to `c` within `max_cells` (Euclidean, in cells); ties go to the
  /// smaller (iy, ix).
  std::optional<Cell> nearest_ok(const Cell& c, int max_cells) const;

 private:
  GridGeometry geometry_;
  double robot_radius_;
  std::vector<std::uint8_t> mask_;
};

struct GridPath {
  std::vector<Cell> cells;
  double cost{0.0};  // metres
};

/// Cost of a cell path under the 8-connected metric: straight steps cost cell_size, diagonal
/// steps sqrt(2) * cell_size. Computed from step counts so equal paths give equal doubles.
double path_cost(const std::vector<Cell>& cells, double cell_size);

/// A* over traversable cells, 8-connected without cutting blocked corners, octile heuristic.
/// Returns nullopt when `to` is not reachable.
std::optional<GridPath> shortest_path(const Traversability& trav, const Cell& from, const Cell& to);

/// Convenience overload that inflates the map first. Throws if `from` lacks clearance.
std::optional<GridPath> shortest_path(const OccupancyGrid& map, const Cell& from, const Cell& to, double robot_radius);

/// One Dijkstra from `from` that stops once every target is settled. Each entry is a shortest
/// path to the matching target (same cost as shortest_path), or nullopt when unreachable.
std::vector<std::optional<GridPath>> shortest_paths(const Traversability& trav, const Cell& from,
                                                    const std::vector<Cell>& targets);

/// Cells reachable from `from`. Diagonal moves need both side cells open, so this is the
/// 4-connected component of traversable cells.
std::vector<std::uint8_t> reachable_from(const Traversability& trav, const Cell& from);

/// Single-source shortest distances (metres) over traversable cells; unreachable cells hold +inf.
std::vector<double> distance_field(const Traversability& trav, const Cell& from);

}  // namespace hexplore
