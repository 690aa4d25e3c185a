#include "hexplore/path_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace hexplore {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

// Diagonal moves need both orthogonal side cells open.
template <class Fn>
void for_each_neighbor(const Traversability& trav, const Cell& c, Fn&& fn) {
  bool open[8];
  for (int k = 0; k < 4; ++k) open[k] = trav.ok(Cell{c.ix + kDx[k], c.iy + kDy[k]});
  for (int k = 0; k < 4; ++k) {
    if (open[k]) fn(Cell{c.ix + kDx[k], c.iy + kDy[k]}, 1.0);
  }
  for (int k = 4; k < 8; ++k) {
    const bool side_x = open[kDx[k] > 0 ? 0 : 1];
    const bool side_y = open[kDy[k] > 0 ? 2 : 3];
    const Cell n{c.ix + kDx[k], c.iy + kDy[k]};
    if (side_x && side_y && trav.ok(n)) fn(n, kSqrt2);
  }
}

double octile(const Cell& a, const Cell& b) {
  const double dx = std::abs(a.ix - b.ix);
  const double dy = std::abs(a.iy - b.iy);
  return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
}

}  // namespace

Traversability::Traversability(const OccupancyGrid& map, double robot_radius)
    : geometry_(map.geometry()), robot_radius_(robot_radius), mask_(geometry_.cell_count(), 0) {
  if (robot_radius < 0.0) throw std::invalid_argument("Traversability: robot_radius must be >= 0");
  const auto& states = map.states();
  for (std::size_t i = 0; i < states.size(); ++i) mask_[i] = states[i] == CellState::free ? 1 : 0;

  const double r_cells = robot_radius / geometry_.cell_size;
  const int win = static_cast<int>(std::ceil(r_cells));
  const double r2 = r_cells * r_cells;
  for (int iy = 0; iy < geometry_.height; ++iy) {
    for (int ix = 0; ix < geometry_.width; ++ix) {
      if (map.at(Cell{ix, iy}) != CellState::occupied) continue;
      for (int dy = -win; dy <= win; ++dy) {
        for (int dx = -win; dx <= win; ++dx) {
          if (dx * dx + dy * dy >= r2) continue;
          const Cell n{ix + dx, iy + dy};
          if (geometry_.contains(n)) mask_[geometry_.index(n)] = 0;
        }
      }
    }
  }
}

std::optional<Cell> Traversability::nearest_ok(const Cell& c, int max_cells) const {
  std::optional<Cell> best;
  long best_d2 = std::numeric_limits<long>::max();
  const long lim2 = static_cast<long>(max_cells) * max_cells;
  for (int dy = -max_cells; dy <= max_cells; ++dy) {
    for (int dx = -max_cells; dx <= max_cells; ++dx) {
      const long d2 = static_cast<long>(dx) * dx + static_cast<long>(dy) * dy;
      if (d2 > lim2) continue;
      const Cell n{c.ix + dx, c.iy + dy};
      if (!ok(n)) continue;
      if (d2 < best_d2 || (d2 == best_d2 && n < *best)) {
        best = n;
        best_d2 = d2;
      }
    }
  }
  return best;
}

double path_cost(const std::vector<Cell>& cells, double cell_size) {
  long straight = 0;
  long diagonal = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const bool diag = cells[i].ix != cells[i - 1].ix && cells[i].iy != cells[i - 1].iy;
    (diag ? diagonal : straight) += 1;
  }
  return (static_cast<double>(straight) + kSqrt2 * static_cast<double>(diagonal)) * cell_size;
}

std::optional<GridPath> shortest_path(const Traversability& trav, const Cell& from, const Cell& to) {
  if (!trav.ok(from)) throw std::invalid_argument("shortest_path: start cell lacks clearance or is not known free");
  if (!trav.ok(to)) return std::nullopt;
  const auto& g = trav.geometry();
  if (from == to) return GridPath{{from}, 0.0};

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> gscore(g.cell_count(), inf);
  std::vector<std::int64_t> parent(g.cell_count(), -1);
  std::vector<std::uint8_t> closed(g.cell_count(), 0);
  using Entry = std::tuple<double, double, std::size_t>;  // f, -g, index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const std::size_t start = g.index(from);
  const std::size_t goal = g.index(to);
  gscore[start] = 0.0;
  open.emplace(octile(from, to), 0.0, start);
  while (!open.empty()) {
    const auto [f, neg_g, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == goal) break;
    const Cell c = g.cell_at(idx);
    for_each_neighbor(trav, c, [&](const Cell& n, double step) {
      const std::size_t ni = g.index(n);
      if (closed[ni]) return;
      const double cand = gscore[idx] + step;
      if (cand < gscore[ni] - 1e-12) {
        gscore[ni] = cand;
        parent[ni] = static_cast<std::int64_t>(idx);
        open.emplace(cand + octile(n, to), -cand, ni);
      }
    });
  }
  if (!closed[goal]) return std::nullopt;

  GridPath path;
  for (std::int64_t i = static_cast<std::int64_t>(goal); i != -1; i = parent[static_cast<std::size_t>(i)]) {
    path.cells.push_back(g.cell_at(static_cast<std::size_t>(i)));
  }
  std::reverse(path.cells.begin(), path.cells.end());
  path.cost = path_cost(path.cells, g.cell_size);
  return path;
}

std::optional<GridPath> shortest_path(const OccupancyGrid& map, const Cell& from, const Cell& to, double robot_radius) {
  return shortest_path(Traversability(map, robot_radius), from, to);
}

std::vector<std::optional<GridPath>> shortest_paths(const Traversability& trav, const Cell& from,
                                                    const std::vector<Cell>& targets) {
  if (!trav.ok(from)) throw std::invalid_argument("shortest_paths: start cell lacks clearance or is not known free");
  const auto& g = trav.geometry();
  std::vector<std::optional<GridPath>> out(targets.size());
  std::vector<std::uint8_t> wanted(g.cell_count(), 0);
  std::size_t remaining = 0;
  for (const auto& t : targets) {
    if (trav.ok(t) && !wanted[g.index(t)]) {
      wanted[g.index(t)] = 1;
      ++remaining;
    }
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.cell_count(), inf);
  std::vector<std::int64_t> parent(g.cell_count(), -1);
  std::vector<std::uint8_t> closed(g.cell_count(), 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[g.index(from)] = 0.0;
  open.emplace(0.0, g.index(from));
  while (!open.empty() && remaining > 0) {
    const auto [d, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (wanted[idx]) --remaining;
    for_each_neighbor(trav, g.cell_at(idx), [&](const Cell& n, double step) {
      const std::size_t ni = g.index(n);
      if (closed[ni]) return;
      const double cand = d + step;
      if (cand < dist[ni] - 1e-12) {
        dist[ni] = cand;
        parent[ni] = static_cast<std::int64_t>(idx);
        open.emplace(cand, ni);
      }
    });
  }

  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!trav.ok(targets[k]) || !closed[g.index(targets[k])]) continue;
    GridPath path;
    for (auto i = static_cast<std::int64_t>(g.index(targets[k])); i != -1; i = parent[static_cast<std::size_t>(i)]) {
      path.cells.push_back(g.cell_at(static_cast<std::size_t>(i)));
    }
    std::reverse(path.cells.begin(), path.cells.end());
    path.cost = path_cost(path.cells, g.cell_size);
    out[k] = std::move(path);
  }
  return out;
}

std::vector<std::uint8_t> reachable_from(const Traversability& trav, const Cell& from) {
  const auto& g = trav.geometry();
  std::vector<std::uint8_t> mask(g.cell_count(), 0);
  if (!trav.ok(from)) return mask;
  std::vector<Cell> stack{from};
  mask[g.index(from)] = 1;
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    for (int k = 0; k < 4; ++k) {
      const Cell n{c.ix + kDx[k], c.iy + kDy[k]};
      if (!trav.ok(n) || mask[g.index(n)]) continue;
      mask[g.index(n)] = 1;
      stack.push_back(n);
    }
  }
  return mask;
}

std::vector<double> distance_field(const Traversability& trav, const Cell& from) {
  const auto& g = trav.geometry();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.cell_count(), inf);
  if (!trav.ok(from)) return dist;
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[g.index(from)] = 0.0;
  open.emplace(0.0, g.index(from));
  while (!open.empty()) {
    const auto [d, idx] = open.top();
    open.pop();
    if (d > dist[idx]) continue;
    for_each_neighbor(trav, g.cell_at(idx), [&](const Cell& n, double step) {
      const std::size_t ni = g.index(n);
      const double cand = d + step;
      if (cand < dist[ni]) {
        dist[ni] = cand;
        open.emplace(cand, ni);
      }
    });
  }
  for (auto& d : dist) {
    if (d != inf) d *= g.cell_size;
  }
  return dist;
}

}  // namespace hexplore
