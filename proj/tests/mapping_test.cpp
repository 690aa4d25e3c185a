#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hexplore/mapping.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace hexplore;
using namespace hexplore::testing;

namespace {

LidarScan one_beam(const Pose& origin, double range, bool hit, double max_range = 15.0) {
  LidarScan s;
  s.origin = origin;
  s.max_range = max_range;
  s.beams.push_back({0.0, range, hit});
  return s;
}

}  // namespace

TEST_SUITE("mapping") {
  TEST_CASE("single beam marks the ray free and the end occupied") {
    OccupancyGrid m(GridGeometry{20, 10, 0.25, {}});
    const Pose p(0.625, 1.375, 0.0);  // centre of cell (2, 5)
    const auto changed = integrate_scan(m, one_beam(p, 2.0, true));
    CHECK(changed == 9);
    for (int ix = 0; ix < 20; ++ix) {
      for (int iy = 0; iy < 10; ++iy) {
        CellState want = CellState::unknown;
        if (iy == 5 && ix >= 2 && ix <= 9) want = CellState::free;
        if (iy == 5 && ix == 10) want = CellState::occupied;
        CHECK(m.at(Cell{ix, iy}) == want);
      }
    }
    CHECK(m.known_count() == 9);
  }

  TEST_CASE("a max-range beam only clears") {
    OccupancyGrid m(GridGeometry{20, 10, 0.25, {}});
    integrate_scan(m, one_beam(Pose(0.625, 1.375, 0.0), 1.0, false));
    // Cells whose interior the first metre crosses: 2..6 (x from 0.625 to 1.625).
    for (int ix = 0; ix < 20; ++ix) {
      CHECK(m.at(Cell{ix, 5}) == (ix >= 2 && ix <= 6 ? CellState::free : CellState::unknown));
    }
  }

  TEST_CASE("occupied beats free within one scan") {
    OccupancyGrid m(GridGeometry{20, 10, 0.25, {}});
    LidarScan s = one_beam(Pose(0.625, 1.375, 0.0), 1.0, true);
    s.beams.push_back({0.0, 3.0, false});
    integrate_scan(m, s);
    CHECK(m.at(Cell{6, 5}) == CellState::occupied);
    CHECK(m.at(Cell{7, 5}) == CellState::free);
  }

  TEST_CASE("knowledge is monotone") {
    OccupancyGrid m(GridGeometry{3, 3, 1.0, {}});
    m.set({0, 0}, CellState::free);
    CHECK_THROWS_AS(m.set({0, 0}, CellState::unknown), std::logic_error);
    m.set({0, 0}, CellState::occupied);
    CHECK_THROWS_AS(m.set({0, 0}, CellState::free), std::logic_error);
    CHECK(m.known_count() == 1);
    CHECK_THROWS_AS(integrate_scan(m, one_beam(Pose(-1.0, 0.5, 0.0), 1.0, false)), std::invalid_argument);
  }

  TEST_CASE("integrating the same scan twice changes nothing") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 20; ++i) {
      const auto w = random_world(rng, 30, 30, 0.15);
      OccupancyGrid m(w.geometry);
      const auto scan = simulate_scan(w, w.start, 360, 5.0);
      integrate_scan(m, scan);
      const auto once = m;
      CHECK(integrate_scan(m, scan) == 0);
      CHECK(m == once);
      // Nothing scanned may contradict the truth.
      for (std::size_t k = 0; k < w.occupied.size(); ++k) {
        if (m.at(k) == CellState::free) CHECK_FALSE(w.occupied[k]);
        if (m.at(k) == CellState::occupied) CHECK(w.occupied[k]);
      }
    }
  }

  TEST_CASE("full scan in the open reveals a disk of the sensor radius") {
    std::vector<std::string> rows(80, std::string(80, '.'));
    rows[40][40] = 'S';
    const auto w = world_from_rows(rows);
    OccupancyGrid m(w.geometry);
    integrate_scan(m, simulate_scan(w, w.start, 720, 3.0));
    // Beams are 3 * 2pi / 720 = 2.6 cm apart at the rim, so every cell lying wholly inside the
    // disk is crossed, and no cell lying wholly outside it can be.
    const auto o = w.start.position();
    std::size_t inside = 0, touching = 0;
    for (std::size_t k = 0; k < m.states().size(); ++k) {
      const auto c = w.geometry.cell_at(k);
      const double x0 = c.ix * 0.25 - o.x, x1 = x0 + 0.25, y0 = c.iy * 0.25 - o.y, y1 = y0 + 0.25;
      const double far = std::hypot(std::max(std::abs(x0), std::abs(x1)), std::max(std::abs(y0), std::abs(y1)));
      const double near = std::hypot(std::max({x0, -x1, 0.0}), std::max({y0, -y1, 0.0}));
      if (far < 3.0) {
        ++inside;
        CHECK(m.at(k) == CellState::free);
      }
      if (near < 3.0) ++touching;
      if (near > 3.0) CHECK(m.at(k) == CellState::unknown);
    }
    CHECK(m.known_count() >= inside);
    CHECK(m.known_count() <= touching);
    const double area = static_cast<double>(m.known_count()) * 0.25 * 0.25;
    CHECK(area >= std::numbers::pi * 2.75 * 2.75);
    CHECK(area <= std::numbers::pi * 3.25 * 3.25);
  }

  TEST_CASE("frontier examples") {
    CHECK(detect_frontiers(uniform_map(10, 10, CellState::free)).empty());
    CHECK(detect_frontiers(uniform_map(10, 10, CellState::unknown)).empty());
    const auto m = map_from_rows({"??#", "..#", "#.?"}, 1.0);
    const auto f = detect_frontiers(m);
    // Row order from iy = 0: (1,0) touches (2,0); (0,1) touches (0,2); (1,1) touches (1,2).
    REQUIRE(f.size() == 3);
    CHECK(f[0].cell == Cell{1, 0});
    CHECK(f[1].cell == Cell{0, 1});
    CHECK(f[2].cell == Cell{1, 1});
    CHECK(f[0].center.x == 1.5);
    CHECK(f[0].center.y == 0.5);
    CHECK_FALSE(is_frontier(m, {2, 0}));
    CHECK_FALSE(is_frontier(m, {5, 5}));
  }

  TEST_CASE("frontier detection matches the definition oracle") {
    const auto r = frontier_suite();
    INFO(r.first_failure);
    CHECK(r.instances >= 100);
    CHECK(r.failures == 0);
  }

  TEST_CASE("coverage examples") {
    const auto w = world_from_rows({"##########", "#S.......#", "#........#", "##########"});
    const auto none = coverage(OccupancyGrid(w.geometry), w, 3.0);
    CHECK(none.explored_pct == 0.0);
    CHECK(none.reachable == 16);
    const auto full = coverage(truth_map(w), w, 3.0);
    CHECK(full.explored_pct == 100.0);
    CHECK(full.explored_area == 16 * 0.0625);

    // Reveal the west half of the corridor and its walls; walls do not count.
    OccupancyGrid half(w.geometry);
    for (int ix = 0; ix <= 4; ++ix) {
      for (int iy = 0; iy < 4; ++iy) half.set({ix, iy}, w.is_occupied({ix, iy}) ? CellState::occupied : CellState::free);
    }
    const auto r = coverage(half, w, 3.0);
    CHECK(r.known_reachable == 8);
    CHECK(r.explored_pct == 50.0);
    CHECK(r.explored_area == 0.5);
    CHECK(r.explored_volume == r.explored_area * 3.0);
    CHECK_THROWS_AS(coverage(OccupancyGrid(GridGeometry{5, 5, 0.25, {}}), w, 3.0), std::invalid_argument);
  }

  TEST_CASE("coverage ignores free space cut off from the start") {
    const auto w = world_from_rows({"#######", "#S.#..#", "#######"});
    CHECK(coverage(truth_map(w), w, 3.0).reachable == 2);
  }

  TEST_CASE("snapshot round trip") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 10; ++i) {
      const auto m = random_tristate(rng, 17, 9, 0.4, 0.2);
      const auto text = export_snapshot(m);
      CHECK(import_snapshot(text) == m);
      CHECK(export_snapshot(import_snapshot(text)) == text);
    }
    CHECK(export_snapshot(map_from_rows({"?#", ".?"}, 0.5)) == "2 2 0.5\n?#\n.?\n");
    CHECK_THROWS_AS(import_snapshot("2 2 0.5\n?#\n.x\n"), ParseError);
    CHECK_THROWS_AS(import_snapshot("2 2 0.5\n?#\n"), ParseError);
  }
}
