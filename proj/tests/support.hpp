#pragma once

// Builders, random instance generators and independent oracles shared by the unit tests and the
// acceptance gate. Oracles here are deliberately naive so they share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "hexplore/geometry.hpp"
#include "hexplore/mapping.hpp"
#include "hexplore/path_search.hpp"
#include "hexplore/world_sim.hpp"

#ifndef HEXPLORE_SOURCE_DIR
#define HEXPLORE_SOURCE_DIR "."
#endif

namespace hexplore::testing {

inline std::string source_path(const std::string& rel) { return std::string(HEXPLORE_SOURCE_DIR) + "/" + rel; }

/// World from rows written top (max y) first, using the world-file characters.
inline WorldGrid world_from_rows(const std::vector<std::string>& rows, double cell = 0.25) {
  std::string text = std::to_string(rows.front().size()) + " " + std::to_string(rows.size()) + " " +
                     format_decimal(cell) + "\n";
  for (const auto& r : rows) text += r + "\n";
  return load_world(text);
}

/// Map from rows of `?`, `.` and `#`, top row first.
inline OccupancyGrid map_from_rows(const std::vector<std::string>& rows, double cell = 0.25) {
  std::string text = std::to_string(rows.front().size()) + " " + std::to_string(rows.size()) + " " +
                     format_decimal(cell) + "\n";
  for (const auto& r : rows) text += r + "\n";
  return import_snapshot(text);
}

inline OccupancyGrid uniform_map(int w, int h, CellState s, double cell = 0.25) {
  OccupancyGrid m(GridGeometry{w, h, cell, {}});
  if (s == CellState::unknown) return m;
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) m.set({ix, iy}, s);
  }
  return m;
}

/// Each cell independently unknown / free / occupied with the given weights.
inline OccupancyGrid random_tristate(std::mt19937_64& rng, int w, int h, double p_unknown, double p_occupied,
                                     double cell = 0.25) {
  OccupancyGrid m(GridGeometry{w, h, cell, {}});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      const double r = u(rng);
      if (r < p_unknown) continue;
      m.set({ix, iy}, r < p_unknown + p_occupied ? CellState::occupied : CellState::free);
    }
  }
  return m;
}

/// Closed random world: border wall, interior cells occupied with probability p, start at a free
/// interior cell chosen by the generator.
inline WorldGrid random_world(std::mt19937_64& rng, int w, int h, double p, double cell = 0.25) {
  std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), '.'));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const bool border = r == 0 || c == 0 || r == h - 1 || c == w - 1;
      if (border || u(rng) < p) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = '#';
    }
  }
  std::uniform_int_distribution<int> cx(1, w - 2), cy(1, h - 2);
  int sx = cx(rng), sy = cy(rng);
  rows[static_cast<std::size_t>(sy)][static_cast<std::size_t>(sx)] = 'S';
  return world_from_rows(rows, cell);
}

/// Ground truth of a world as a fully known map.
inline OccupancyGrid truth_map(const WorldGrid& w) {
  OccupancyGrid m(w.geometry);
  for (std::size_t i = 0; i < w.occupied.size(); ++i) {
    m.set(w.geometry.cell_at(i), w.occupied[i] ? CellState::occupied : CellState::free);
  }
  return m;
}

// ---- oracles ----

/// Frontier definition applied cell by cell.
inline std::vector<Cell> frontier_oracle(const OccupancyGrid& m) {
  std::vector<Cell> out;
  const auto& g = m.geometry();
  for (int iy = 0; iy < g.height; ++iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      if (m.at(Cell{ix, iy}) != CellState::free) continue;
      bool f = false;
      const Cell nb[4] = {{ix + 1, iy}, {ix - 1, iy}, {ix, iy + 1}, {ix, iy - 1}};
      for (const auto& n : nb) f = f || (g.contains(n) && m.at(n) == CellState::unknown);
      if (f) out.push_back({ix, iy});
    }
  }
  return out;
}

/// Dijkstra over an explicit 0/1 mask with the 8-connected no-corner-cutting move set.
inline std::vector<double> dijkstra_oracle(const std::vector<std::uint8_t>& open, int w, int h, Cell from, double cell) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(open.size(), inf);
  auto idx = [&](int x, int y) { return static_cast<std::size_t>(y * w + x); };
  auto ok = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && open[idx(x, y)]; };
  if (!ok(from.ix, from.iy)) return d;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[idx(from.ix, from.iy)] = 0.0;
  pq.push({0.0, idx(from.ix, from.iy)});
  while (!pq.empty()) {
    auto [dist, i] = pq.top();
    pq.pop();
    if (dist > d[i]) continue;
    const int x = static_cast<int>(i) % w;
    const int y = static_cast<int>(i) / w;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (!ok(x + dx, y + dy)) continue;
        if (dx != 0 && dy != 0 && (!ok(x + dx, y) || !ok(x, y + dy))) continue;
        const double step = (dx != 0 && dy != 0 ? std::sqrt(2.0) : 1.0) * cell;
        const auto j = idx(x + dx, y + dy);
        if (d[i] + step < d[j] - 1e-12) {
          d[j] = d[i] + step;
          pq.push({d[j], j});
        }
      }
    }
  }
  return d;
}

/// Traversability recomputed by brute force: known free and every occupied centre at least
/// `radius` away.
inline std::vector<std::uint8_t> clearance_oracle(const OccupancyGrid& m, double radius) {
  const auto& g = m.geometry();
  std::vector<Cell> occ;
  for (int iy = 0; iy < g.height; ++iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      if (m.at(Cell{ix, iy}) == CellState::occupied) occ.push_back({ix, iy});
    }
  }
  std::vector<std::uint8_t> ok(g.cell_count(), 0);
  for (int iy = 0; iy < g.height; ++iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      if (m.at(Cell{ix, iy}) != CellState::free) continue;
      bool clear = true;
      for (const auto& o : occ) {
        if (std::hypot((o.ix - ix) * g.cell_size, (o.iy - iy) * g.cell_size) < radius - 1e-12) {
          clear = false;
          break;
        }
      }
      ok[g.index({ix, iy})] = clear ? 1 : 0;
    }
  }
  return ok;
}

/// Marches a ray in steps of cell_size / 100 until it enters an occupied (or outside) cell.
inline double fine_step_range(const WorldGrid& w, const Pose& p, double bearing, double max_range) {
  const double cs = w.geometry.cell_size;
  const double step = cs / 100.0;
  const double a = p.theta + bearing;
  const double ca = std::cos(a), sa = std::sin(a);
  Cell prev = w.geometry.cell_of(p.position());
  for (double t = 0.0; t <= max_range; t += step) {
    const Cell c = w.geometry.cell_of({p.x + t * ca, p.y + t * sa});
    // A step can jump diagonally past a corner; the ray then clipped one of the two side cells,
    // whichever boundary line it crosses first.
    if (c.ix != prev.ix && c.iy != prev.iy) {
      const double tx = ((c.ix > prev.ix ? c.ix : prev.ix) * cs - p.x) / ca;
      const double ty = ((c.iy > prev.iy ? c.iy : prev.iy) * cs - p.y) / sa;
      if (tx != ty) {
        const Cell side = tx < ty ? Cell{c.ix, prev.iy} : Cell{prev.ix, c.iy};
        if (w.is_occupied(side)) return std::min(tx, ty);
      }
    }
    if (w.is_occupied(c)) return t;
    prev = c;
  }
  return max_range;
}

}  // namespace hexplore::testing
