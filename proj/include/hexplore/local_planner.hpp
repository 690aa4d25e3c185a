#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "hexplore/geometry.hpp"
#include "hexplore/mapping.hpp"
#include "hexplore/path_search.hpp"

namespace hexplore {

/// Square planning region centred on the robot.
struct LocalHorizon {
  Pose center;
  double half_side{7.5};

  bool contains(const Point2& p) const {
    return std::abs(p.x - center.x) <= half_side && std::abs(p.y - center.y) <= half_side;
  }
};

struct Viewpoint {
  Pose pose;
  Cell cell;
  Cell source;                        // frontier cell the candidate was sampled from
  std::size_t gain{0};                // unknown cells observable from here
  std::vector<std::size_t> observed;  // indices of those unknown cells, ascending
  std::vector<std::size_t> covered;   // indices of visible frontier cells, ascending
};

struct GainResult {
  std::size_t gain{0};
  std::vector<std::size_t> observed;
  std::vector<std::size_t> covered;
};

/// Observable-area gain: unknown cells whose centre lies within `sensor_range` of the viewpoint
/// cell centre and whose centre-to-centre ray crosses no occupied cell. Unknown cells do not
/// occlude. `covered` lists the frontier cells visible under the same rule.
/// Throws std::invalid_argument when the viewpoint is not on a free cell.
GainResult evaluate_gain(const OccupancyGrid& map, const Pose& vp, double sensor_range);
GainResult evaluate_gain(const OccupancyGrid& map, const Cell& vp, double sensor_range);

/// Every centre-to-centre ray from a cell to the cells of a disk around it, merged into a prefix
/// tree of relative offsets and stored in preorder. Shared by all gain evaluations with the same
/// range in cells.
struct RayTree {
  struct Node {
    std::int16_t dx;
    std::int16_t dy;
    std::uint32_t subtree_end;  // one past the last descendant
    bool terminal;              // some ray ends here
  };
  std::vector<Node> nodes;

  static std::shared_ptr<const RayTree> for_range(double range_cells);
};

/// Batch form of evaluate_gain for many viewpoints on one map: the frontier mask is computed once
/// and visibility comes from a single walk of the shared RayTree per viewpoint, pruned at
/// occupied cells. Results are identical to tracing each ray separately.
class GainEvaluator {
 public:
  GainEvaluator(const OccupancyGrid& map, double sensor_range);
  GainResult operator()(const Cell& vp) const;

 private:
  const OccupancyGrid& map_;
  std::vector<std::uint8_t> frontier_;
  std::shared_ptr<const RayTree> rays_;
};

/// Every `stride`-th in-horizon frontier (or, with `rng`, each one with probability 1/stride),
/// projected to the nearest traversable cell within `max_projection` cells, deduplicated by cell.
/// The candidate heading faces its source frontier. Gains are left at zero.
std::vector<Viewpoint> sample_viewpoints(const OccupancyGrid& map, const std::vector<FrontierCell>& frontiers,
                                         const LocalHorizon& horizon, int stride, const Traversability& trav,
                                         int max_projection = 5, std::mt19937_64* rng = nullptr);
std::vector<Viewpoint> sample_viewpoints(const OccupancyGrid& map, const std::vector<FrontierCell>& frontiers,
                                         const LocalHorizon& horizon, int stride, double robot_radius);

struct Selection {
  std::vector<std::size_t> picked;     // candidate indices in pick order
  std::vector<std::size_t> marginals;  // marginal gain of each pick
};

/// Greedy maximum coverage over the candidates' observed unknown cells. Stops when the best
/// marginal gain drops below `min_gain` or every frontier cell covered by any candidate is
/// covered by the picks. Ties go to the lower candidate index. The first `forced` candidates are
/// picked up front, in index order, whatever their gain.
Selection greedy_selection(const std::vector<Viewpoint>& candidates, std::size_t min_gain, std::size_t forced = 0);
std::vector<Viewpoint> select_viewpoints(const std::vector<Viewpoint>& candidates, std::size_t min_gain);

/// Open tours over a (k+1)x(k+1) distance matrix where node 0 is the fixed start.
using DistanceMatrix = std::vector<std::vector<double>>;
double open_tour_length(const std::vector<std::size_t>& order, const DistanceMatrix& d);
std::vector<std::size_t> nearest_neighbor_order(const DistanceMatrix& d);
/// Segment-reversal local search until no reversal shortens the tour; `order` excludes node 0.
void two_opt(std::vector<std::size_t>& order, const DistanceMatrix& d);

struct LocalPlan {
  std::vector<Viewpoint> viewpoints;  // visiting order
  std::vector<Cell> path;             // stitched 8-connected cell path from the start cell
  std::vector<std::size_t> stops;     // path index at which each viewpoint is reached
  double length{0.0};                 // metres
  std::vector<Viewpoint> dropped;     // unreachable from the start

  bool empty() const { return viewpoints.empty(); }
};

/// Orders the selected viewpoints by nearest neighbour then 2-opt, with A* path lengths as
/// distances, and stitches the A* segments into one path. With `keep_first`, selected[0] (if
/// reachable) is visited first and only the rest is ordered.
LocalPlan order_tour(const Cell& start, const std::vector<Viewpoint>& selected, const Traversability& trav,
                     bool keep_first = false);
LocalPlan order_tour(const Pose& start, const std::vector<Viewpoint>& selected, const OccupancyGrid& map,
                     double robot_radius);

struct LocalPlannerConfig {
  double half_side{7.5};
  double sensor_range{15.0};
  double robot_radius{0.3};
  int stride{0};  // 0: ceil(|frontiers in horizon| / target_candidates)
  int target_candidates{40};
  std::size_t min_gain{5};
  int max_projection{5};
  bool random_sampling{false};
};

/// One local planning iteration: sample, drop candidates unreachable from `start` or listed in
/// `excluded`, score, select, order. A `committed` viewpoint (the one being driven to) that still
/// has min_gain stays the first stop, so successive plans do not flip between equally good tours.
LocalPlan plan_local(const OccupancyGrid& map, const Traversability& trav, const Cell& start, const Pose& robot,
                     const std::vector<FrontierCell>& frontiers, const LocalPlannerConfig& cfg,
                     const std::set<Cell>& excluded = {}, std::mt19937_64* rng = nullptr,
                     const Viewpoint* committed = nullptr);

}  // namespace hexplore
