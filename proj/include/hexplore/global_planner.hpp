#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hexplore/geometry.hpp"
#include "hexplore/mapping.hpp"
#include "hexplore/path_search.hpp"

namespace hexplore {

enum class RegionStatus { unexplored, exploring, explored, dormant };

const char* to_string(RegionStatus s);

/// One cell of the global partition. Cell bounds are half-open: [cx0, cx1) x [cy0, cy1).
struct Region {
  int rx{0};
  int ry{0};
  int cx0{0}, cy0{0}, cx1{0}, cy1{0};
  Point2 min_corner;
  Point2 max_corner;
  Point2 centroid;
  RegionStatus status{RegionStatus::unexplored};
  std::size_t unknown_cells{0};
  std::size_t occupied_cells{0};
  std::size_t total_cells{0};

  bool contains(const Cell& c) const { return c.ix >= cx0 && c.ix < cx1 && c.iy >= cy0 && c.iy < cy1; }
};

/// Tiles the map with square regions of `region_size` metres (the last row and column may be
/// truncated) and labels each by its cells: all unknown, none unknown, or a mixture.
std::vector<Region> classify_regions(const OccupancyGrid& map, double region_size);

/// Index of the region containing `c` in a list produced by classify_regions.
std::size_t region_index_of(const std::vector<Region>& regions, const Cell& c);

struct GlobalRoute {
  int rx{0};
  int ry{0};
  Cell goal;
  GridPath path;
  double length() const { return path.cost; }
};

/// Goal cell of a region: the centroid cell if it is traversable and reachable, otherwise the
/// reachable traversable cell nearest to the centroid. `dist` is a distance_field from the robot.
std::optional<Cell> region_goal(const Region& region, const Traversability& trav, const std::vector<double>& dist);

/// Nearest exploring region by path length through known free space; ties go to the smaller
/// (ry, rx). Dormant, explored and unexplored regions are never targets.
std::optional<GlobalRoute> pick_target(const std::vector<Region>& regions, const Cell& start, const Traversability& trav);
std::optional<GlobalRoute> pick_target(const std::vector<Region>& regions, const Pose& robot, const OccupancyGrid& map,
                                       double robot_radius);

/// Frontier cells that still count: at least one unknown 4-neighbour lies in a non-dormant
/// region, and some traversable cell within `max_projection` cells is reachable (finite `dist`).
std::vector<FrontierCell> reachable_frontiers(const std::vector<FrontierCell>& frontiers,
                                              const std::vector<Region>& regions, const OccupancyGrid& map,
                                              const Traversability& trav, const std::vector<double>& dist,
                                              int max_projection);

/// True iff no reachable frontier remains and every region is explored or dormant.
bool is_exploration_complete(const std::vector<Region>& regions, const std::vector<FrontierCell>& reachable);

/// One `rx ry status` line per region.
std::string region_dump(const std::vector<Region>& regions);

/// Stateful side of global planning: the dormant set, per-region failure counts and the region
/// currently being routed to. A routing attempt fails when the region has no reachable goal, when
/// none of its unknown cells borders a reachable frontier, or when the robot reaches the goal and
/// the local planner still has nothing. After `dormant_after` consecutive failures the region
/// goes dormant until a cell inside it changes.
class GlobalPlanner {
 public:
  explicit GlobalPlanner(double region_size, int dormant_after = 3, double arrive_tolerance = 0.75,
                         int max_projection = 5);

  /// Classifies the map and applies the dormant set.
  const std::vector<Region>& update(const OccupancyGrid& map);

  /// Routing step used when the local planner comes back empty. Calls update() first. Keeps
  /// routing to the current target while it stays exploring and reachable; otherwise picks
  /// the path-nearest exploring region.
  std::optional<GlobalRoute> plan(const OccupancyGrid& map, const Traversability& trav, const Cell& start);

  /// The local planner found work at `robot`: the enclosing region's failure count restarts
  /// and the current target is released.
  void local_plan_found(const Cell& robot);

  const std::vector<Region>& regions() const { return regions_; }
  double region_size() const { return region_size_; }
  std::optional<std::size_t> target() const { return target_; }

 private:
  struct Track {
    int failures{0};
    bool dormant{false};
    std::size_t unknown_seen{0};
    std::size_t occupied_seen{0};
  };

  void fail(std::size_t i);

  double region_size_;
  int dormant_after_;
  double arrive_tolerance_;
  int max_projection_;
  std::vector<Region> regions_;
  std::vector<Track> tracks_;
  std::optional<std::size_t> target_;
};

}  // namespace hexplore
