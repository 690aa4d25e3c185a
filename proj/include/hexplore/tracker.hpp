#pragma once

#include <limits>
#include <vector>

#include "hexplore/geometry.hpp"
#include "hexplore/world_sim.hpp"

namespace hexplore {

struct TrackerConfig {
  double lookahead_gain{1.0};  // s
  double lookahead_min{0.5};   // m
  double lookahead_max{3.0};   // m
  double v_max{1.5};
  double omega_max{1.57};
  double goal_tolerance{0.2};

  void validate() const;
};

/// Polyline with cumulative arc length.
class TrackedPath {
 public:
  TrackedPath() = default;
  explicit TrackedPath(std::vector<Point2> waypoints);

  const std::vector<Point2>& waypoints() const { return waypoints_; }
  const std::vector<double>& arc() const { return arc_; }
  double length() const { return arc_.empty() ? 0.0 : arc_.back(); }
  bool empty() const { return waypoints_.empty(); }

  /// Point at arc length s, clamped to the ends.
  Point2 point_at(double s) const;

 private:
  std::vector<Point2> waypoints_;
  std::vector<double> arc_;
};

struct Lookahead {
  Point2 point;
  std::size_t progress{0};  // segment index of the closest point
  double closest_arc{0.0};
};

/// Closest path point at or after segment `progress` (a segment is searched only if it starts
/// within 2 * lookahead + 1 m of arc of the best match so far), then the point `lookahead` further along the path, or the final waypoint if the path ends first.
Lookahead lookahead_point(const TrackedPath& path, const Pose& pose, double lookahead, std::size_t progress = 0);

/// clamp(gain * speed, min, max).
double compute_lookahead(const TrackerConfig& cfg, double current_v);

/// Pure pursuit law: curvature 2 y / L^2 in the robot frame, full speed tapered linearly inside
/// 2 * goal_tolerance of the goal, rotate in place when the target is more than 90 degrees off.
/// When the curvature needs more than omega_max at that speed, the speed drops to omega_max / |k|
/// so the commanded arc is still the pursuit arc.
VelocityCommand pursuit_command(const Pose& pose, const Point2& target, const TrackerConfig& cfg,
                                double distance_to_goal = std::numeric_limits<double>::infinity());

/// Stateful tracking session over one path. The progress index only moves forward.
class PurePursuit {
 public:
  PurePursuit(const TrackerConfig& cfg, TrackedPath path);

  VelocityCommand update(const Pose& pose, double current_v);
  bool reached(const Pose& pose) const;

  const TrackedPath& path() const { return path_; }
  std::size_t progress() const { return progress_; }
  double closest_arc() const { return closest_arc_; }

 private:
  TrackerConfig cfg_;
  TrackedPath path_;
  std::size_t progress_{0};
  double closest_arc_{0.0};
};

}  // namespace hexplore
