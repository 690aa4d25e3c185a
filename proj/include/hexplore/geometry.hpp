#pragma once

#include <cmath>
#include <compare>
#include <numbers>

namespace hexplore {

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

struct Point2 {
  double x{0.0};
  double y{0.0};
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Planar robot pose. theta is kept in (-pi, pi] by every producer in this library.
struct Pose {
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  Pose() = default;
  Pose(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  Point2 position() const { return {x, y}; }
};

/// Integer grid cell. Ordered by (iy, ix) so sorted containers follow row-major scan order.
struct Cell {
  int ix{0};
  int iy{0};

  friend bool operator==(const Cell&, const Cell&) = default;
  friend std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.iy <=> b.iy; c != 0) return c;
    return a.ix <=> b.ix;
  }
};

}  // namespace hexplore
