#include "hexplore/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace hexplore {

const char* to_string(RegionStatus s) {
  switch (s) {
    case RegionStatus::unexplored: return "unexplored";
    case RegionStatus::exploring: return "exploring";
    case RegionStatus::explored: return "explored";
    case RegionStatus::dormant: return "dormant";
  }
  return "?";
}

std::vector<Region> classify_regions(const OccupancyGrid& map, double region_size) {
  const auto& g = map.geometry();
  if (region_size < 2.0 * g.cell_size - 1e-12) throw std::invalid_argument("classify_regions: region_size < 2 * cell_size");
  const int rc = std::max(2, static_cast<int>(std::lround(region_size / g.cell_size)));
  const int nx = (g.width + rc - 1) / rc;
  const int ny = (g.height + rc - 1) / rc;

  std::vector<Region> regions;
  regions.reserve(static_cast<std::size_t>(nx * ny));
  for (int ry = 0; ry < ny; ++ry) {
    for (int rx = 0; rx < nx; ++rx) {
      Region r;
      r.rx = rx;
      r.ry = ry;
      r.cx0 = rx * rc;
      r.cy0 = ry * rc;
      r.cx1 = std::min(g.width, r.cx0 + rc);
      r.cy1 = std::min(g.height, r.cy0 + rc);
      r.min_corner = {g.origin.x + r.cx0 * g.cell_size, g.origin.y + r.cy0 * g.cell_size};
      r.max_corner = {g.origin.x + r.cx1 * g.cell_size, g.origin.y + r.cy1 * g.cell_size};
      r.centroid = {0.5 * (r.min_corner.x + r.max_corner.x), 0.5 * (r.min_corner.y + r.max_corner.y)};
      for (int iy = r.cy0; iy < r.cy1; ++iy) {
        for (int ix = r.cx0; ix < r.cx1; ++ix) {
          const CellState s = map.at(Cell{ix, iy});
          r.unknown_cells += s == CellState::unknown ? 1 : 0;
          r.occupied_cells += s == CellState::occupied ? 1 : 0;
        }
      }
      r.total_cells = static_cast<std::size_t>((r.cx1 - r.cx0) * (r.cy1 - r.cy0));
      if (r.unknown_cells == r.total_cells) {
        r.status = RegionStatus::unexplored;
      } else if (r.unknown_cells == 0) {
        r.status = RegionStatus::explored;
      } else {
        r.status = RegionStatus::exploring;
      }
      regions.push_back(r);
    }
  }
  return regions;
}

std::size_t region_index_of(const std::vector<Region>& regions, const Cell& c) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].contains(c)) return i;
  }
  return regions.size();
}

std::optional<Cell> region_goal(const Region& region, const Traversability& trav, const std::vector<double>& dist) {
  const auto& g = trav.geometry();
  auto usable = [&](const Cell& c) { return trav.ok(c) && std::isfinite(dist[g.index(c)]); };
  const Cell centre = g.cell_of(region.centroid);
  if (region.contains(centre) && usable(centre)) return centre;

  std::optional<Cell> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int iy = region.cy0; iy < region.cy1; ++iy) {
    for (int ix = region.cx0; ix < region.cx1; ++ix) {
      const Cell c{ix, iy};
      if (!usable(c)) continue;
      const Point2 p = g.center(c);
      const double d2 = (p.x - region.centroid.x) * (p.x - region.centroid.x) +
                        (p.y - region.centroid.y) * (p.y - region.centroid.y);
      if (d2 < best_d2) {  // row-major scan keeps the smaller (iy, ix) on ties
        best = c;
        best_d2 = d2;
      }
    }
  }
  return best;
}

namespace {

struct Candidate {
  double dist;
  int ry;
  int rx;
  std::size_t index;
  Cell goal;

  bool operator<(const Candidate& o) const { return std::tie(dist, ry, rx) < std::tie(o.dist, o.ry, o.rx); }
};

}  // namespace

std::optional<GlobalRoute> pick_target(const std::vector<Region>& regions, const Cell& start, const Traversability& trav) {
  if (!trav.ok(start)) throw std::invalid_argument("pick_target: start cell is not traversable");
  const auto dist = distance_field(trav, start);
  const auto& g = trav.geometry();
  std::optional<Candidate> best;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].status != RegionStatus::exploring) continue;
    const auto goal = region_goal(regions[i], trav, dist);
    if (!goal) continue;
    const Candidate c{dist[g.index(*goal)], regions[i].ry, regions[i].rx, i, *goal};
    if (!best || c < *best) best = c;
  }
  if (!best) return std::nullopt;
  auto path = shortest_path(trav, start, best->goal);
  if (!path) return std::nullopt;
  return GlobalRoute{best->rx, best->ry, best->goal, std::move(*path)};
}

std::optional<GlobalRoute> pick_target(const std::vector<Region>& regions, const Pose& robot, const OccupancyGrid& map,
                                       double robot_radius) {
  const Traversability trav(map, robot_radius);
  return pick_target(regions, map.geometry().cell_of(robot.position()), trav);
}

std::vector<FrontierCell> reachable_frontiers(const std::vector<FrontierCell>& frontiers,
                                              const std::vector<Region>& regions, const OccupancyGrid& map,
                                              const Traversability& trav, const std::vector<double>& dist,
                                              int max_projection) {
  const auto& g = map.geometry();
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  std::vector<FrontierCell> out;
  for (const auto& f : frontiers) {
    bool live = false;
    for (int k = 0; k < 4 && !live; ++k) {
      const Cell n{f.cell.ix + dx[k], f.cell.iy + dy[k]};
      if (!g.contains(n) || map.at(n) != CellState::unknown) continue;
      const auto ri = region_index_of(regions, n);
      live = ri < regions.size() && regions[ri].status != RegionStatus::dormant;
    }
    if (!live) continue;
    const auto near = trav.nearest_ok(f.cell, max_projection);
    if (near && std::isfinite(dist[g.index(*near)])) out.push_back(f);
  }
  return out;
}

bool is_exploration_complete(const std::vector<Region>& regions, const std::vector<FrontierCell>& reachable) {
  if (!reachable.empty()) return false;
  return std::all_of(regions.begin(), regions.end(), [](const Region& r) {
    return r.status == RegionStatus::explored || r.status == RegionStatus::dormant;
  });
}

std::string region_dump(const std::vector<Region>& regions) {
  std::string out;
  for (const auto& r : regions) {
    out += std::to_string(r.rx) + " " + std::to_string(r.ry) + " " + to_string(r.status) + "\n";
  }
  return out;
}

GlobalPlanner::GlobalPlanner(double region_size, int dormant_after, double arrive_tolerance, int max_projection)
    : region_size_(region_size),
      dormant_after_(dormant_after),
      arrive_tolerance_(arrive_tolerance),
      max_projection_(max_projection) {
  if (dormant_after < 1) throw std::invalid_argument("GlobalPlanner: dormant_after must be >= 1");
}

const std::vector<Region>& GlobalPlanner::update(const OccupancyGrid& map) {
  regions_ = classify_regions(map, region_size_);
  if (tracks_.size() != regions_.size()) {
    tracks_.assign(regions_.size(), Track{});
    target_.reset();
  }
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    auto& t = tracks_[i];
    const bool changed = regions_[i].unknown_cells != t.unknown_seen || regions_[i].occupied_cells != t.occupied_seen;
    t.unknown_seen = regions_[i].unknown_cells;
    t.occupied_seen = regions_[i].occupied_cells;
    if (t.dormant && changed) t = Track{0, false, t.unknown_seen, t.occupied_seen};
    if (t.dormant) regions_[i].status = RegionStatus::dormant;
  }
  return regions_;
}

void GlobalPlanner::fail(std::size_t i) {
  auto& t = tracks_[i];
  if (++t.failures >= dormant_after_) {
    t.dormant = true;
    regions_[i].status = RegionStatus::dormant;
  }
  if (target_ == i) target_.reset();
}

void GlobalPlanner::local_plan_found(const Cell& robot) {
  target_.reset();
  for (std::size_t i = 0; i < regions_.size() && i < tracks_.size(); ++i) {
    if (regions_[i].contains(robot)) tracks_[i].failures = 0;
  }
}

std::optional<GlobalRoute> GlobalPlanner::plan(const OccupancyGrid& map, const Traversability& trav, const Cell& start) {
  update(map);
  if (!trav.ok(start)) throw std::invalid_argument("GlobalPlanner::plan: start cell is not traversable");
  const auto dist = distance_field(trav, start);
  const auto& g = trav.geometry();

  // Regions holding an unknown neighbour of some reachable frontier: the only ones where
  // arriving can lead to a local plan.
  std::vector<std::uint8_t> has_work(regions_.size(), 0);
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  for (const auto& f : reachable_frontiers(detect_frontiers(map), regions_, map, trav, dist, max_projection_)) {
    for (int k = 0; k < 4; ++k) {
      const Cell n{f.cell.ix + dx[k], f.cell.iy + dy[k]};
      if (!g.contains(n) || map.at(n) != CellState::unknown) continue;
      const auto ri = region_index_of(regions_, n);
      if (ri < regions_.size()) has_work[ri] = 1;
    }
  }

  std::vector<Candidate> candidates;
  bool retry_here = false;
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    const auto status = regions_[i].status;
    if (status != RegionStatus::exploring && status != RegionStatus::unexplored) continue;
    const auto goal = status == RegionStatus::exploring && has_work[i] ? region_goal(regions_[i], trav, dist)
                                                                        : std::nullopt;
    if (!goal) {
      fail(i);
      continue;
    }
    if (dist[g.index(*goal)] <= arrive_tolerance_) {
      // Standing on the goal with nothing for the local planner: that is a failed attempt, and
      // the next attempts are made from here rather than after a round trip elsewhere.
      fail(i);
      retry_here = retry_here || !tracks_[i].dormant;
      continue;
    }
    candidates.push_back({dist[g.index(*goal)], regions_[i].ry, regions_[i].rx, i, *goal});
  }
  if (retry_here) return std::nullopt;
  std::sort(candidates.begin(), candidates.end());
  if (target_) {
    // Stay with the current target while it is still a candidate.
    const auto kept = std::find_if(candidates.begin(), candidates.end(), [&](const Candidate& c) { return c.index == *target_; });
    if (kept != candidates.end()) std::rotate(candidates.begin(), kept, kept + 1);
  }
  target_.reset();
  for (const auto& c : candidates) {
    auto path = shortest_path(trav, start, c.goal);
    if (!path) continue;
    target_ = c.index;
    return GlobalRoute{c.rx, c.ry, c.goal, std::move(*path)};
  }
  return std::nullopt;
}

}  // namespace hexplore
