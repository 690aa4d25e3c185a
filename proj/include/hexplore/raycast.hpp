#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>

#include "hexplore/grid.hpp"

namespace hexplore {

/// Walks the cells crossed by the ray `origin + t * (cos a, sin a)` for t in [0, max_t], in order.
/// `visit(cell, t_enter)` is called for every cell, starting with the one containing the origin
/// (t_enter = 0); returning false stops the walk. Cells outside the grid are reported too, so the
/// caller decides what the boundary means.
template <class Visit>
void traverse_ray(const GridGeometry& g, const Point2& origin, double angle, double max_t, Visit&& visit) {
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  const double inv = 1.0 / g.cell_size;
  // Work in cell units.
  const double ox = (origin.x - g.origin.x) * inv;
  const double oy = (origin.y - g.origin.y) * inv;
  const double tmax_cells = max_t * inv;

  Cell c{static_cast<int>(std::floor(ox)), static_cast<int>(std::floor(oy))};
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();

  const double delta_x = step_x != 0 ? std::abs(1.0 / dx) : inf;
  const double delta_y = step_y != 0 ? std::abs(1.0 / dy) : inf;
  double next_x = inf;
  double next_y = inf;
  if (step_x > 0) next_x = (c.ix + 1 - ox) / dx;
  if (step_x < 0) next_x = (c.ix - ox) / dx;
  if (step_y > 0) next_y = (c.iy + 1 - oy) / dy;
  if (step_y < 0) next_y = (c.iy - oy) / dy;

  double t = 0.0;
  while (true) {
    if (!visit(c, t * g.cell_size)) return;
    if (next_x < next_y) {
      t = next_x;
      next_x += delta_x;
      c.ix += step_x;
    } else {
      t = next_y;
      next_y += delta_y;
      c.iy += step_y;
    }
    if (t > tmax_cells) return;
  }
}

/// Walks the cells whose open interior is crossed by the segment joining the centres of `from`
/// and `to`, in order, including both end cells. Integer arithmetic only, so a segment passing
/// exactly through a grid corner steps diagonally without touching the two side cells.
template <class Visit>
void traverse_centers(const Cell& from, const Cell& to, Visit&& visit) {
  const long nx = std::labs(static_cast<long>(to.ix) - from.ix);
  const long ny = std::labs(static_cast<long>(to.iy) - from.iy);
  const int sx = to.ix > from.ix ? 1 : -1;
  const int sy = to.iy > from.iy ? 1 : -1;
  Cell c = from;
  if (!visit(c)) return;
  long ix = 0;
  long iy = 0;
  while (ix < nx || iy < ny) {
    // Next x boundary at t = (2ix+1)/(2nx), next y boundary at t = (2iy+1)/(2ny).
    const long lhs = (2 * ix + 1) * ny;
    const long rhs = (2 * iy + 1) * nx;
    if (ix < nx && (iy >= ny || lhs < rhs)) {
      ++ix;
      c.ix += sx;
    } else if (iy < ny && (ix >= nx || rhs < lhs)) {
      ++iy;
      c.iy += sy;
    } else {
      ++ix;
      ++iy;
      c.ix += sx;
      c.iy += sy;
    }
    if (!visit(c)) return;
  }
}

}  // namespace hexplore
