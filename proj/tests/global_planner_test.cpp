#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "hexplore/global_planner.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace hexplore;
using namespace hexplore::testing;

namespace {

// Independent statement of the goal rule: the centroid's cell if usable, else the usable cell
// closest to the centroid with the smaller (iy, ix) on ties.
std::optional<Cell> goal_oracle(const Region& r, const std::vector<std::uint8_t>& open, const std::vector<double>& dist,
                                const GridGeometry& g) {
  auto usable = [&](int ix, int iy) {
    const auto i = g.index({ix, iy});
    return open[i] && std::isfinite(dist[i]);
  };
  const int cx = static_cast<int>(std::floor(r.centroid.x / g.cell_size));
  const int cy = static_cast<int>(std::floor(r.centroid.y / g.cell_size));
  if (cx >= r.cx0 && cx < r.cx1 && cy >= r.cy0 && cy < r.cy1 && usable(cx, cy)) return Cell{cx, cy};
  std::optional<Cell> best;
  double bd = 0.0;
  for (int iy = r.cy0; iy < r.cy1; ++iy) {
    for (int ix = r.cx0; ix < r.cx1; ++ix) {
      if (!usable(ix, iy)) continue;
      const double d = std::pow((ix + 0.5) * g.cell_size - r.centroid.x, 2) + std::pow((iy + 0.5) * g.cell_size - r.centroid.y, 2);
      if (!best || d < bd) {
        best = Cell{ix, iy};
        bd = d;
      }
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("global_planner") {
  TEST_CASE("uniform maps") {
    for (const auto& r : classify_regions(uniform_map(100, 60, CellState::unknown), 10.0)) {
      CHECK(r.status == RegionStatus::unexplored);
    }
    const auto known = classify_regions(uniform_map(100, 60, CellState::free), 10.0);
    CHECK(known.size() == 6);
    for (const auto& r : known) CHECK(r.status == RegionStatus::explored);
    CHECK_THROWS_AS(classify_regions(uniform_map(10, 10, CellState::free), 0.3), std::invalid_argument);
  }

  TEST_CASE("regions tile the map, truncating the last row and column") {
    const auto regions = classify_regions(uniform_map(50, 45, CellState::free), 10.0);
    REQUIRE(regions.size() == 4);
    CHECK(regions[1].cx0 == 40);
    CHECK(regions[1].cx1 == 50);
    CHECK(regions[3].cy1 == 45);
    CHECK(regions[3].total_cells == 50);
    std::size_t total = 0;
    for (const auto& r : regions) total += r.total_cells;
    CHECK(total == 50 * 45);
    CHECK(region_index_of(regions, {45, 2}) == 1);
    CHECK(region_index_of(regions, {45, 44}) == 3);
    CHECK(region_index_of(regions, {50, 0}) == regions.size());
    CHECK(region_dump(regions) == "0 0 explored\n1 0 explored\n0 1 explored\n1 1 explored\n");
  }

  TEST_CASE("a scan disk spanning four regions") {
    std::vector<std::string> rows(120, std::string(120, '.'));
    rows[119 - 40][40] = 'S';  // cell (40, 40): the corner shared by four 10 m regions
    const auto w = world_from_rows(rows);
    OccupancyGrid m(w.geometry);
    integrate_scan(m, simulate_scan(w, Pose(10.0, 10.0, 0.0), 720, 3.0));
    const auto regions = classify_regions(m, 10.0);
    REQUIRE(regions.size() == 9);
    // Census by brute force: a cell belongs to region (floor(ix / 40), floor(iy / 40)).
    std::map<std::pair<int, int>, std::pair<int, int>> census;  // unknown, total
    for (int iy = 0; iy < 120; ++iy) {
      for (int ix = 0; ix < 120; ++ix) {
        auto& c = census[{ix / 40, iy / 40}];
        c.first += m.at(Cell{ix, iy}) == CellState::unknown ? 1 : 0;
        c.second += 1;
      }
    }
    int exploring = 0;
    for (const auto& r : regions) {
      const auto [unknown, total] = census[{r.rx, r.ry}];
      CHECK(r.unknown_cells == static_cast<std::size_t>(unknown));
      const auto want = unknown == total ? RegionStatus::unexplored
                                         : (unknown == 0 ? RegionStatus::explored : RegionStatus::exploring);
      CHECK(r.status == want);
      exploring += r.status == RegionStatus::exploring ? 1 : 0;
      const bool touched = r.rx <= 1 && r.ry <= 1;
      CHECK((r.status == RegionStatus::exploring) == touched);
    }
    CHECK(exploring == 4);
  }

  TEST_CASE("no exploring region, no target") {
    const auto m = uniform_map(40, 40, CellState::free);
    CHECK_FALSE(pick_target(classify_regions(m, 2.5), Pose(1.0, 1.0, 0.0), m, 0.3));
  }

  TEST_CASE("nearer of two exploring regions") {
    // 1 m regions along a 12 m strip; regions 4 and 9 hold one unknown cell each.
    auto m = uniform_map(48, 4, CellState::free);
    OccupancyGrid strip(m.geometry());
    for (int iy = 0; iy < 4; ++iy) {
      for (int ix = 0; ix < 48; ++ix) {
        if (!((ix == 19 || ix == 39) && iy == 3)) strip.set({ix, iy}, CellState::free);
      }
    }
    auto regions = classify_regions(strip, 1.0);
    CHECK(std::count_if(regions.begin(), regions.end(),
                        [](const Region& r) { return r.status == RegionStatus::exploring; }) == 2);
    std::reverse(regions.begin(), regions.end());
    const Traversability trav(strip, 0.0);
    const auto route = pick_target(regions, Cell{2, 2}, trav);
    REQUIRE(route);
    CHECK(route->rx == 4);
    CHECK(route->goal == Cell{18, 2});
    CHECK(route->length() == doctest::Approx(4.0));
    CHECK(route->path.cells.front() == Cell{2, 2});
  }

  TEST_CASE("path distance, not straight-line distance, picks the region") {
    // A wall at ix = 10 with a gap at the top separates the robot from region (1,0).
    OccupancyGrid m(GridGeometry{40, 20, 0.25, {}});
    for (int iy = 0; iy < 20; ++iy) {
      for (int ix = 0; ix < 40; ++ix) {
        const Cell c{ix, iy};
        if (c == Cell{19, 0} || c == Cell{0, 19}) continue;
        m.set(c, ix == 10 && iy <= 15 ? CellState::occupied : CellState::free);
      }
    }
    const auto regions = classify_regions(m, 2.5);
    const Traversability trav(m, 0.0);
    const Cell robot{8, 5};
    const auto route = pick_target(regions, robot, trav);
    REQUIRE(route);
    CHECK(route->rx == 0);
    CHECK(route->ry == 1);

    // Straight-line distance would have preferred (1,0).
    const auto& g = m.geometry();
    CHECK(distance(g.center(robot), g.center({15, 5})) < distance(g.center(robot), g.center({5, 15})));
    const auto open = clearance_oracle(m, 0.0);
    const auto d = dijkstra_oracle(open, 40, 20, robot, 0.25);
    CHECK(d[g.index({5, 15})] < d[g.index({15, 5})]);
    CHECK(route->length() == doctest::Approx(d[g.index({5, 15})]).epsilon(1e-12));
  }

  TEST_CASE("pick_target matches a Dijkstra oracle and ignores list order") {
    std::mt19937_64 rng(51);
    std::uniform_int_distribution<int> c(0, 39);
    int compared = 0;
    for (int i = 0; i < 120; ++i) {
      const auto m = random_tristate(rng, 40, 40, 0.08, 0.12);
      auto regions = classify_regions(m, 2.5);
      const Traversability trav(m, 0.3);
      const Cell start{c(rng), c(rng)};
      if (!trav.ok(start)) continue;
      const auto open = clearance_oracle(m, 0.3);
      const auto dist = dijkstra_oracle(open, 40, 40, start, 0.25);
      std::optional<std::tuple<double, int, int>> best;
      std::optional<Cell> best_goal;
      for (const auto& r : regions) {
        if (r.status != RegionStatus::exploring) continue;
        const auto goal = goal_oracle(r, open, dist, m.geometry());
        if (!goal) continue;
        const auto key = std::make_tuple(dist[m.geometry().index(*goal)], r.ry, r.rx);
        // Path lengths equal up to rounding are ties, settled by (ry, rx).
        auto before = [](const auto& a, const auto& b) {
          if (std::abs(std::get<0>(a) - std::get<0>(b)) > 1e-9) return std::get<0>(a) < std::get<0>(b);
          return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
        };
        if (!best || before(key, *best)) {
          best = key;
          best_goal = goal;
        }
      }
      const auto route = pick_target(regions, start, trav);
      REQUIRE(route.has_value() == best.has_value());
      std::shuffle(regions.begin(), regions.end(), rng);
      const auto again = pick_target(regions, start, trav);
      REQUIRE(again.has_value() == route.has_value());
      if (!route) continue;
      ++compared;
      CHECK(route->goal == *best_goal);
      CHECK(route->rx == std::get<2>(*best));
      CHECK(route->ry == std::get<1>(*best));
      CHECK(std::abs(route->length() - std::get<0>(*best)) <= 1e-9);
      CHECK(again->goal == route->goal);
      CHECK(again->length() == route->length());
    }
    CHECK(compared >= 50);
  }

  TEST_CASE("region goal falls back to the nearest usable cell") {
    auto m = uniform_map(20, 20, CellState::free);
    m.set({10, 10}, CellState::occupied);
    const auto regions = classify_regions(m, 5.0);
    const Traversability trav(m, 0.0);
    const auto d = distance_field(trav, {0, 0});
    // Centroid (2.5, 2.5) sits on the corner of cells (9,9), (10,9), (9,10), (10,10); (10,10) is blocked.
    CHECK(region_goal(regions[0], trav, d) == Cell{9, 9});
    // With 1.6 cells of clearance the whole inner ring is out; four cells tie on the next ring.
    const Traversability wide(m, 0.4);
    CHECK(region_goal(regions[0], wide, distance_field(wide, {0, 0})) == Cell{9, 8});
  }

  TEST_CASE("completion examples") {
    const auto done = classify_regions(uniform_map(40, 40, CellState::free), 2.5);
    CHECK(is_exploration_complete(done, {}));
    auto m = uniform_map(40, 40, CellState::free);
    OccupancyGrid partial(m.geometry());
    for (int iy = 0; iy < 40; ++iy) {
      for (int ix = 0; ix < 30; ++ix) partial.set({ix, iy}, CellState::free);
    }
    const auto regions = classify_regions(partial, 2.5);
    const Traversability trav(partial, 0.0);
    const auto dist = distance_field(trav, {0, 0});
    const auto live = reachable_frontiers(detect_frontiers(partial), regions, partial, trav, dist, 5);
    CHECK(live.size() == 40);
    CHECK_FALSE(is_exploration_complete(regions, live));
    CHECK_FALSE(is_exploration_complete(regions, {}));
  }

  TEST_CASE("frontiers into dormant or unreachable space do not count") {
    // Frontiers on the far side of the wall cannot be reached; the two on the near side border
    // the unknown cell (3,3), whose region we then mark dormant.
    const auto m = map_from_rows({
        "...?#.??",
        "....#...",
        "....#...",
        "....#...",
    }, 1.0);
    auto regions = classify_regions(m, 2.0);
    const Traversability trav(m, 0.0);
    const auto dist = distance_field(trav, {0, 0});
    const auto all = detect_frontiers(m);
    CHECK(all.size() == 5);
    auto live = reachable_frontiers(all, regions, m, trav, dist, 0);
    REQUIRE(live.size() == 2);
    CHECK(live[0].cell == Cell{3, 2});
    CHECK(live[1].cell == Cell{2, 3});
    for (auto& r : regions) {
      if (r.contains({3, 3})) r.status = RegionStatus::dormant;
    }
    CHECK(reachable_frontiers(all, regions, m, trav, dist, 0).empty());
  }

  TEST_CASE("a sealed pocket goes dormant after three attempts") {
    // Everything known except the inside of a closed room.
    const auto w = world_from_rows({
        "........................",
        "........................",
        "..........######........",
        "..........#....#........",
        "..........#....#........",
        "..........#....#........",
        "..........######........",
        "........................",
        "S.......................",
        "........................",
    }, 0.5);
    OccupancyGrid m(w.geometry);
    std::vector<Cell> inside;
    for (std::size_t i = 0; i < w.occupied.size(); ++i) {
      const auto c = w.geometry.cell_at(i);
      const bool in_room = c.ix >= 11 && c.ix <= 14 && c.iy >= 4 && c.iy <= 6;
      if (in_room) {
        inside.push_back(c);
        continue;
      }
      m.set(c, w.occupied[i] ? CellState::occupied : CellState::free);
    }
    GlobalPlanner gp(5.0, 3);
    const Traversability trav(m, 0.3);
    for (int attempt = 1; attempt <= 3; ++attempt) {
      CHECK_FALSE(gp.plan(m, trav, w.start_cell));
      const auto live = reachable_frontiers(detect_frontiers(m), gp.regions(), m, trav, distance_field(trav, w.start_cell), 5);
      CHECK(live.empty());
      CHECK(is_exploration_complete(gp.regions(), live) == (attempt == 3));
    }
    CHECK(std::any_of(gp.regions().begin(), gp.regions().end(),
                      [](const Region& r) { return r.status == RegionStatus::dormant; }));

    // A change inside wakes the region up again.
    m.set(inside.front(), CellState::free);
    const auto& after = gp.update(m);
    CHECK(after[region_index_of(after, inside.front())].status == RegionStatus::exploring);
  }

  TEST_CASE("routing commits to a target and fails when standing on it") {
    // Known corridor with unknown space at the far east end.
    OccupancyGrid m(GridGeometry{80, 8, 0.25, {}});
    for (int iy = 0; iy < 8; ++iy) {
      for (int ix = 0; ix < 65; ++ix) m.set({ix, iy}, CellState::free);
    }
    const Traversability trav(m, 0.3);
    GlobalPlanner gp(2.5, 3, 0.75, 5);
    const auto route = gp.plan(m, trav, {2, 4});
    REQUIRE(route);
    CHECK(route->rx == 6);
    CHECK(route->goal == Cell{64, 3});
    CHECK(gp.target().has_value());
    const auto again = gp.plan(m, trav, {20, 4});
    REQUIRE(again);
    CHECK(again->goal == route->goal);

    // At the goal with nothing to do locally: no route, and the attempt counts.
    for (int k = 0; k < 3; ++k) CHECK_FALSE(gp.plan(m, trav, route->goal));
    const auto& regions = gp.regions();
    CHECK(regions[region_index_of(regions, route->goal)].status == RegionStatus::dormant);
    CHECK_THROWS_AS(GlobalPlanner(10.0, 0), std::invalid_argument);
  }
}
