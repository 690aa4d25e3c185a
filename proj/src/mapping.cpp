#include "hexplore/mapping.hpp"

#include <charconv>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "hexplore/raycast.hpp"

namespace hexplore {

OccupancyGrid::OccupancyGrid(const GridGeometry& geometry)
    : geometry_(geometry), states_(geometry.cell_count(), CellState::unknown) {
  if (geometry.width < 1 || geometry.height < 1 || !(geometry.cell_size > 0.0)) {
    throw std::invalid_argument("OccupancyGrid: invalid geometry");
  }
}

void OccupancyGrid::set(const Cell& c, CellState s) {
  auto& cur = states_[geometry_.index(c)];
  if (cur == s) return;
  if (s == CellState::unknown) throw std::logic_error("OccupancyGrid: known cell cannot become unknown");
  if (cur == CellState::occupied) throw std::logic_error("OccupancyGrid: occupied cell cannot be cleared");
  if (cur == CellState::unknown) ++known_count_;
  cur = s;
}

std::size_t integrate_scan(OccupancyGrid& map, const LidarScan& scan) {
  const auto& g = map.geometry();
  const Point2 o = scan.origin.position();
  if (!g.contains(g.cell_of(o))) throw std::invalid_argument("integrate_scan: scan origin outside map bounds");

  std::vector<std::size_t> free_cells;
  std::vector<std::size_t> hit_cells;
  std::vector<std::size_t> walked;
  for (const Beam& b : scan.beams) {
    // The terminal cell is the last one the walk enters at or before the range. The simulator
    // reports a hit range as the entry distance of the same walk, so this is the cell it hit,
    // even where a nudged endpoint would land in a neighbour near a grid corner.
    walked.clear();
    bool left_grid = false;
    traverse_ray(g, o, scan.origin.theta + b.bearing, b.range + g.cell_size, [&](const Cell& c, double t_enter) {
      if (t_enter > b.range) return false;
      if (!g.contains(c)) {
        left_grid = true;
        return false;
      }
      walked.push_back(g.index(c));
      return true;
    });
    if (walked.empty()) continue;
    if (b.hit && !left_grid) {
      hit_cells.push_back(walked.back());
      walked.pop_back();
    }
    free_cells.insert(free_cells.end(), walked.begin(), walked.end());
  }

  std::vector<std::uint8_t> marked_hit(g.cell_count(), 0);
  for (auto idx : hit_cells) marked_hit[idx] = 1;

  std::size_t changed = 0;
  for (auto idx : hit_cells) {
    if (map.at(idx) != CellState::occupied) {
      map.set(g.cell_at(idx), CellState::occupied);
      ++changed;
    }
  }
  for (auto idx : free_cells) {
    if (marked_hit[idx] || map.at(idx) != CellState::unknown) continue;
    map.set(g.cell_at(idx), CellState::free);
    ++changed;
  }
  return changed;
}

bool is_frontier(const OccupancyGrid& map, const Cell& c) {
  if (!map.is_free(c)) return false;
  const auto& g = map.geometry();
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    const Cell n{c.ix + dx[k], c.iy + dy[k]};
    if (g.contains(n) && map.at(n) == CellState::unknown) return true;
  }
  return false;
}

std::vector<FrontierCell> detect_frontiers(const OccupancyGrid& map) {
  const auto& g = map.geometry();
  std::vector<FrontierCell> out;
  for (int iy = 0; iy < g.height; ++iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      const Cell c{ix, iy};
      if (is_frontier(map, c)) out.push_back({c, g.center(c)});
    }
  }
  return out;
}

std::vector<std::uint8_t> reachable_free(const WorldGrid& world) {
  const auto& g = world.geometry;
  std::vector<std::uint8_t> mask(g.cell_count(), 0);
  if (world.is_occupied(world.start_cell)) return mask;
  std::deque<Cell> queue{world.start_cell};
  mask[g.index(world.start_cell)] = 1;
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const Cell n{c.ix + dx[k], c.iy + dy[k]};
      if (!g.contains(n) || world.is_occupied(n) || mask[g.index(n)]) continue;
      mask[g.index(n)] = 1;
      queue.push_back(n);
    }
  }
  return mask;
}

CoverageReport coverage(const OccupancyGrid& map, const WorldGrid& world, double nominal_height) {
  return coverage(map, world, reachable_free(world), nominal_height);
}

CoverageReport coverage(const OccupancyGrid& map, const WorldGrid& world, const std::vector<std::uint8_t>& reachable,
                        double nominal_height) {
  if (!map.geometry().same_shape(world.geometry)) throw std::invalid_argument("coverage: map/world geometry mismatch");
  CoverageReport r;
  const auto& states = map.states();
  for (std::size_t i = 0; i < reachable.size(); ++i) {
    if (!reachable[i]) continue;
    ++r.reachable;
    if (states[i] != CellState::unknown) ++r.known_reachable;
  }
  const double cs = world.geometry.cell_size;
  r.explored_area = static_cast<double>(r.known_reachable) * cs * cs;
  r.explored_volume = r.explored_area * nominal_height;
  r.explored_pct = r.reachable == 0 ? 0.0 : 100.0 * static_cast<double>(r.known_reachable) / static_cast<double>(r.reachable);
  return r;
}

std::string format_decimal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_decimal failed");
  return std::string(buf, ptr);
}

std::string export_snapshot(const OccupancyGrid& map) {
  const auto& g = map.geometry();
  std::string out = std::to_string(g.width) + " " + std::to_string(g.height) + " " + format_decimal(g.cell_size) + "\n";
  out.reserve(out.size() + g.cell_count() + static_cast<std::size_t>(g.height));
  for (int iy = g.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      switch (map.at(Cell{ix, iy})) {
        case CellState::unknown: out.push_back('?'); break;
        case CellState::free: out.push_back('.'); break;
        case CellState::occupied: out.push_back('#'); break;
      }
    }
    out.push_back('\n');
  }
  return out;
}

OccupancyGrid import_snapshot(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  GridGeometry g;
  {
    std::istringstream hs(line);
    if (!(hs >> g.width >> g.height >> g.cell_size) || g.width < 1 || g.height < 1 || !(g.cell_size > 0.0)) {
      throw ParseError(1, "header must be `width height cell_size`");
    }
  }
  OccupancyGrid map(g);
  for (int r = 0; r < g.height; ++r) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError(line_no, "missing row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != static_cast<std::size_t>(g.width)) throw ParseError(line_no, "ragged row");
    const int iy = g.height - 1 - r;
    for (int ix = 0; ix < g.width; ++ix) {
      switch (line[static_cast<std::size_t>(ix)]) {
        case '?': break;
        case '.': map.set({ix, iy}, CellState::free); break;
        case '#': map.set({ix, iy}, CellState::occupied); break;
        default: throw ParseError(line_no, "unknown character");
      }
    }
  }
  return map;
}

}  // namespace hexplore
