#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include "hexplore/geometry.hpp"

namespace hexplore {

/// Shape and placement of a regular 2D grid. Cell (0,0) has its lower-left corner at `origin`;
/// iy grows with world y.
struct GridGeometry {
  int width{0};
  int height{0};
  double cell_size{1.0};
  Point2 origin{};

  std::size_t cell_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

  bool contains(const Cell& c) const { return c.ix >= 0 && c.iy >= 0 && c.ix < width && c.iy < height; }

  std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c.iy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.ix);
  }

  Cell cell_at(std::size_t idx) const {
    return {static_cast<int>(idx % static_cast<std::size_t>(width)),
            static_cast<int>(idx / static_cast<std::size_t>(width))};
  }

  /// Cell containing a world point; may lie outside the grid.
  Cell cell_of(const Point2& p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / cell_size)),
            static_cast<int>(std::floor((p.y - origin.y) / cell_size))};
  }

  Point2 center(const Cell& c) const {
    return {origin.x + (c.ix + 0.5) * cell_size, origin.y + (c.iy + 0.5) * cell_size};
  }

  double extent_x() const { return width * cell_size; }
  double extent_y() const { return height * cell_size; }

  bool same_shape(const GridGeometry& o) const {
    return width == o.width && height == o.height && std::abs(cell_size - o.cell_size) < 1e-12 &&
           std::abs(origin.x - o.origin.x) < 1e-9 && std::abs(origin.y - o.origin.y) < 1e-9;
  }
};

}  // namespace hexplore
