#include "hexplore/local_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "hexplore/raycast.hpp"

namespace hexplore {

GainResult evaluate_gain(const OccupancyGrid& map, const Pose& vp, double sensor_range) {
  return evaluate_gain(map, map.geometry().cell_of(vp.position()), sensor_range);
}

GainResult evaluate_gain(const OccupancyGrid& map, const Cell& vp, double sensor_range) {
  return GainEvaluator(map, sensor_range)(vp);
}

namespace {

RayTree build_ray_tree(double range_cells) {
  // Insertion tree with first-child / next-sibling links, flattened to preorder afterwards.
  struct Build {
    int dx, dy;
    int first_child{-1};
    int next_sibling{-1};
    bool terminal{false};
  };
  std::vector<Build> b{{0, 0}};
  const int win = static_cast<int>(std::floor(range_cells));
  const double r2 = range_cells * range_cells;
  for (int dy = -win; dy <= win; ++dy) {
    for (int dx = -win; dx <= win; ++dx) {
      if (static_cast<double>(dx * dx + dy * dy) > r2) continue;
      int node = 0;
      traverse_centers({0, 0}, {dx, dy}, [&](const Cell& c) {
        if (c.ix == 0 && c.iy == 0) return true;
        int child = b[node].first_child;
        while (child >= 0 && (b[child].dx != c.ix || b[child].dy != c.iy)) child = b[child].next_sibling;
        if (child < 0) {
          child = static_cast<int>(b.size());
          b.push_back({c.ix, c.iy, -1, b[node].first_child});
          b[node].first_child = child;
        }
        node = child;
        return true;
      });
      b[node].terminal = true;
    }
  }

  RayTree tree;
  tree.nodes.reserve(b.size());
  std::vector<std::size_t> open;  // preorder slots still waiting for their subtree_end
  // Iterative preorder: a node's subtree ends where the next node at its depth or shallower starts.
  std::vector<int> depth_of;
  std::vector<std::pair<int, int>> work{{0, 0}};  // (build node, depth)
  while (!work.empty()) {
    const auto [n, depth] = work.back();
    work.pop_back();
    while (!open.empty() && depth_of[open.back()] >= depth) {
      tree.nodes[open.back()].subtree_end = static_cast<std::uint32_t>(tree.nodes.size());
      open.pop_back();
    }
    open.push_back(tree.nodes.size());
    depth_of.push_back(depth);
    tree.nodes.push_back({static_cast<std::int16_t>(b[n].dx), static_cast<std::int16_t>(b[n].dy), 0, b[n].terminal});
    for (int c = b[n].first_child; c >= 0; c = b[c].next_sibling) work.push_back({c, depth + 1});
  }
  for (auto slot : open) tree.nodes[slot].subtree_end = static_cast<std::uint32_t>(tree.nodes.size());
  return tree;
}

}  // namespace

std::shared_ptr<const RayTree> RayTree::for_range(double range_cells) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const RayTree>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[range_cells];
  if (!slot) slot = std::make_shared<const RayTree>(build_ray_tree(range_cells));
  return slot;
}

GainEvaluator::GainEvaluator(const OccupancyGrid& map, double sensor_range)
    : map_(map), rays_(RayTree::for_range(sensor_range / map.geometry().cell_size)) {
  const auto& g = map.geometry();
  frontier_.assign(g.cell_count(), 0);
  for (const auto& f : detect_frontiers(map)) frontier_[g.index(f.cell)] = 1;
}

GainResult GainEvaluator::operator()(const Cell& vp) const {
  if (!map_.is_free(vp)) throw std::invalid_argument("evaluate_gain: viewpoint is not on a free cell");
  const auto& g = map_.geometry();
  const auto& states = map_.states();
  const auto& nodes = rays_->nodes;
  GainResult out;
  out.observed.reserve(4096);
  std::size_t i = 0;
  while (i < nodes.size()) {
    const auto& n = nodes[i];
    const int x = vp.ix + n.dx;
    const int y = vp.iy + n.dy;
    // Rays move monotonically away from the viewpoint, so nothing below an outside cell is inside.
    if (x < 0 || y < 0 || x >= g.width || y >= g.height) {
      i = n.subtree_end;
      continue;
    }
    const std::size_t idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(g.width) + static_cast<std::size_t>(x);
    const CellState s = states[idx];
    if (n.terminal) {
      if (s == CellState::unknown) {
        out.observed.push_back(idx);
      } else if (frontier_[idx]) {
        out.covered.push_back(idx);
      }
    }
    i = s == CellState::occupied ? n.subtree_end : i + 1;
  }
  std::sort(out.observed.begin(), out.observed.end());
  std::sort(out.covered.begin(), out.covered.end());
  out.gain = out.observed.size();
  return out;
}

std::vector<Viewpoint> sample_viewpoints(const OccupancyGrid& map, const std::vector<FrontierCell>& frontiers,
                                         const LocalHorizon& horizon, int stride, const Traversability& trav,
                                         int max_projection, std::mt19937_64* rng) {
  if (stride < 1) throw std::invalid_argument("sample_viewpoints: stride must be >= 1");
  const auto& g = map.geometry();
  std::vector<Viewpoint> out;
  std::set<Cell> seen;
  std::uniform_int_distribution<int> pick(0, stride - 1);
  std::size_t k = 0;
  for (const auto& f : frontiers) {
    if (!horizon.contains(f.center)) continue;
    const bool take = rng != nullptr ? pick(*rng) == 0 : (k % static_cast<std::size_t>(stride)) == 0;
    ++k;
    if (!take) continue;
    const auto proj = trav.nearest_ok(f.cell, max_projection);
    if (!proj || !seen.insert(*proj).second) continue;

    Viewpoint vp;
    vp.cell = *proj;
    vp.source = f.cell;
    const Point2 p = g.center(*proj);
    double heading = 0.0;
    if (*proj != f.cell) {
      heading = std::atan2(f.center.y - p.y, f.center.x - p.x);
    } else {
      // Standing on the frontier itself: face its first unknown neighbour.
      constexpr int dx[4] = {1, -1, 0, 0};
      constexpr int dy[4] = {0, 0, 1, -1};
      for (int n = 0; n < 4; ++n) {
        const Cell nb{f.cell.ix + dx[n], f.cell.iy + dy[n]};
        if (g.contains(nb) && map.at(nb) == CellState::unknown) {
          heading = std::atan2(dy[n], dx[n]);
          break;
        }
      }
    }
    vp.pose = Pose(p.x, p.y, heading);
    out.push_back(std::move(vp));
  }
  return out;
}

std::vector<Viewpoint> sample_viewpoints(const OccupancyGrid& map, const std::vector<FrontierCell>& frontiers,
                                         const LocalHorizon& horizon, int stride, double robot_radius) {
  return sample_viewpoints(map, frontiers, horizon, stride, Traversability(map, robot_radius));
}

Selection greedy_selection(const std::vector<Viewpoint>& candidates, std::size_t min_gain, std::size_t forced) {
  Selection sel;
  if (candidates.empty()) return sel;

  std::size_t max_cell = 0;
  std::set<std::size_t> all_frontiers;
  for (const auto& c : candidates) {
    if (!c.observed.empty()) max_cell = std::max(max_cell, c.observed.back());
    all_frontiers.insert(c.covered.begin(), c.covered.end());
  }
  std::vector<std::uint8_t> taken(max_cell + 1, 0);
  std::vector<std::uint8_t> used(candidates.size(), 0);
  std::set<std::size_t> frontiers_covered;

  auto marginal = [&](std::size_t i) {
    std::size_t m = 0;
    for (auto cell : candidates[i].observed) m += taken[cell] ? 0 : 1;
    return m;
  };
  for (std::size_t step = 0;; ++step) {
    std::size_t best = candidates.size();
    std::size_t best_gain = 0;
    if (step < std::min(forced, candidates.size())) {
      best = step;
      best_gain = marginal(step);
    } else {
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (used[i]) continue;
        const std::size_t m = marginal(i);
        if (best == candidates.size() || m > best_gain) {
          best = i;
          best_gain = m;
        }
      }
      if (best == candidates.size() || best_gain < min_gain || best_gain == 0) break;
    }
    used[best] = 1;
    sel.picked.push_back(best);
    sel.marginals.push_back(best_gain);
    for (auto cell : candidates[best].observed) taken[cell] = 1;
    frontiers_covered.insert(candidates[best].covered.begin(), candidates[best].covered.end());
    if (!all_frontiers.empty() && frontiers_covered.size() == all_frontiers.size()) break;
  }
  return sel;
}

std::vector<Viewpoint> select_viewpoints(const std::vector<Viewpoint>& candidates, std::size_t min_gain) {
  const auto sel = greedy_selection(candidates, min_gain);
  std::vector<Viewpoint> out;
  out.reserve(sel.picked.size());
  for (auto i : sel.picked) out.push_back(candidates[i]);
  return out;
}

double open_tour_length(const std::vector<std::size_t>& order, const DistanceMatrix& d) {
  double len = 0.0;
  std::size_t prev = 0;
  for (auto n : order) {
    len += d[prev][n];
    prev = n;
  }
  return len;
}

std::vector<std::size_t> nearest_neighbor_order(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order;
  std::vector<std::uint8_t> visited(n, 0);
  visited[0] = 1;
  std::size_t cur = 0;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t j = 1; j < n; ++j) {
      if (visited[j]) continue;
      if (best == n || d[cur][j] < d[cur][best]) best = j;
    }
    visited[best] = 1;
    order.push_back(best);
    cur = best;
  }
  return order;
}

void two_opt(std::vector<std::size_t>& order, const DistanceMatrix& d) {
  const std::size_t k = order.size();
  if (k < 2) return;
  // Position p in [0, k) holds order[p]; its predecessor is node 0 when p == 0.
  auto node = [&](std::size_t p) { return order[p]; };
  auto pred = [&](std::size_t p) { return p == 0 ? std::size_t{0} : order[p - 1]; };
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        // Reverse order[i..j]: edges (pred(i), i) and (j, j+1) become (pred(i), j) and (i, j+1).
        double before = d[pred(i)][node(i)];
        double after = d[pred(i)][node(j)];
        if (j + 1 < k) {
          before += d[node(j)][node(j + 1)];
          after += d[node(i)][node(j + 1)];
        }
        if (after < before - 1e-9) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
  }
}

LocalPlan order_tour(const Cell& start, const std::vector<Viewpoint>& selected, const Traversability& trav,
                     bool keep_first) {
  LocalPlan plan;
  if (!trav.ok(start)) throw std::invalid_argument("order_tour: start cell is not traversable");

  std::vector<Cell> cells;
  for (const auto& vp : selected) cells.push_back(vp.cell);
  auto from_start = shortest_paths(trav, start, cells);

  std::vector<const Viewpoint*> reachable;
  std::vector<Cell> nodes{start};
  std::vector<GridPath> first_leg;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    if (!from_start[k]) {
      plan.dropped.push_back(selected[k]);
      continue;
    }
    reachable.push_back(&selected[k]);
    nodes.push_back(selected[k].cell);
    first_leg.push_back(std::move(*from_start[k]));
  }
  if (reachable.empty()) return plan;

  const std::size_t n = nodes.size();
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<std::optional<GridPath>>> seg(n, std::vector<std::optional<GridPath>>(n));
  for (std::size_t j = 1; j < n; ++j) {
    d[0][j] = d[j][0] = first_leg[j - 1].cost;
    seg[0][j] = std::move(first_leg[j - 1]);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // Both ends are reachable from the start, hence from each other.
    const std::vector<Cell> later(nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1, nodes.end());
    auto paths = shortest_paths(trav, nodes[i], later);
    for (std::size_t j = i + 1; j < n; ++j) {
      seg[i][j] = std::move(paths[j - i - 1]);
      d[i][j] = d[j][i] = seg[i][j]->cost;
    }
  }

  std::vector<std::size_t> order;
  if (keep_first && reachable.front() == &selected.front()) {
    // Order the rest as an open tour starting from node 1.
    std::vector<std::size_t> ids{1};
    for (std::size_t j = 2; j < n; ++j) ids.push_back(j);
    DistanceMatrix rest(ids.size(), std::vector<double>(ids.size()));
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = 0; b < ids.size(); ++b) rest[a][b] = d[ids[a]][ids[b]];
    }
    auto sub = nearest_neighbor_order(rest);
    two_opt(sub, rest);
    order.push_back(1);
    for (auto k : sub) order.push_back(ids[k]);
  } else {
    order = nearest_neighbor_order(d);
    two_opt(order, d);
  }

  plan.path.push_back(start);
  std::size_t prev = 0;
  for (auto node : order) {
    plan.viewpoints.push_back(*reachable[node - 1]);
    std::vector<Cell> cells;
    if (prev < node) {
      cells = seg[prev][node]->cells;
    } else {
      cells = seg[node][prev]->cells;
      std::reverse(cells.begin(), cells.end());
    }
    plan.path.insert(plan.path.end(), cells.begin() + 1, cells.end());
    plan.stops.push_back(plan.path.size() - 1);
    plan.length += d[prev][node];
    prev = node;
  }
  return plan;
}

LocalPlan order_tour(const Pose& start, const std::vector<Viewpoint>& selected, const OccupancyGrid& map,
                     double robot_radius) {
  const Traversability trav(map, robot_radius);
  return order_tour(map.geometry().cell_of(start.position()), selected, trav);
}

LocalPlan plan_local(const OccupancyGrid& map, const Traversability& trav, const Cell& start, const Pose& robot,
                     const std::vector<FrontierCell>& frontiers, const LocalPlannerConfig& cfg,
                     const std::set<Cell>& excluded, std::mt19937_64* rng, const Viewpoint* committed) {
  const LocalHorizon horizon{robot, cfg.half_side};
  int stride = cfg.stride;
  if (stride <= 0) {
    const auto in_horizon = static_cast<std::size_t>(
        std::count_if(frontiers.begin(), frontiers.end(), [&](const FrontierCell& f) { return horizon.contains(f.center); }));
    const auto target = static_cast<std::size_t>(std::max(1, cfg.target_candidates));
    stride = static_cast<int>(std::max<std::size_t>(1, (in_horizon + target - 1) / target));
  }
  auto candidates = sample_viewpoints(map, frontiers, horizon, stride, trav, cfg.max_projection,
                                      cfg.random_sampling ? rng : nullptr);

  const auto reach = reachable_from(trav, start);
  const auto& g = map.geometry();
  const GainEvaluator evaluate(map, cfg.sensor_range);
  std::vector<Viewpoint> scored;
  scored.reserve(candidates.size() + 1);
  std::size_t forced = 0;
  if (committed && !excluded.contains(committed->cell) && trav.ok(committed->cell) && reach[g.index(committed->cell)]) {
    Viewpoint vp = *committed;
    auto gain = evaluate(vp.cell);
    if (gain.gain >= cfg.min_gain) {
      vp.gain = gain.gain;
      vp.observed = std::move(gain.observed);
      vp.covered = std::move(gain.covered);
      scored.push_back(std::move(vp));
      forced = 1;
    }
  }
  for (auto& vp : candidates) {
    if (excluded.contains(vp.cell) || !reach[g.index(vp.cell)]) continue;
    if (forced && vp.cell == scored.front().cell) continue;
    auto gain = evaluate(vp.cell);
    vp.gain = gain.gain;
    vp.observed = std::move(gain.observed);
    vp.covered = std::move(gain.covered);
    scored.push_back(std::move(vp));
  }
  const auto sel = greedy_selection(scored, cfg.min_gain, forced);
  std::vector<Viewpoint> selected;
  selected.reserve(sel.picked.size());
  for (auto i : sel.picked) selected.push_back(std::move(scored[i]));
  return order_tour(start, selected, trav, forced > 0);
}

}  // namespace hexplore
