#include "hexplore/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hexplore {

void TrackerConfig::validate() const {
  if (!(lookahead_min > 0.0) || lookahead_min > lookahead_max) {
    throw std::invalid_argument("TrackerConfig: need 0 < lookahead_min <= lookahead_max");
  }
  if (!(v_max > 0.0) || !(omega_max > 0.0) || !(goal_tolerance > 0.0) || lookahead_gain < 0.0) {
    throw std::invalid_argument("TrackerConfig: v_max, omega_max, goal_tolerance must be > 0");
  }
}

TrackedPath::TrackedPath(std::vector<Point2> waypoints) : waypoints_(std::move(waypoints)) {
  arc_.reserve(waypoints_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    if (i > 0) s += distance(waypoints_[i - 1], waypoints_[i]);
    arc_.push_back(s);
  }
}

Point2 TrackedPath::point_at(double s) const {
  if (waypoints_.empty()) throw std::logic_error("TrackedPath::point_at on empty path");
  if (s <= 0.0) return waypoints_.front();
  if (s >= arc_.back()) return waypoints_.back();
  const auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  const auto i = static_cast<std::size_t>(it - arc_.begin()) - 1;
  const double seg = arc_[i + 1] - arc_[i];
  const double t = seg > 0.0 ? (s - arc_[i]) / seg : 0.0;
  return {waypoints_[i].x + t * (waypoints_[i + 1].x - waypoints_[i].x),
          waypoints_[i].y + t * (waypoints_[i + 1].y - waypoints_[i].y)};
}

Lookahead lookahead_point(const TrackedPath& path, const Pose& pose, double lookahead, std::size_t progress) {
  if (path.empty()) throw std::invalid_argument("lookahead_point: empty path");
  if (!(lookahead > 0.0)) throw std::invalid_argument("lookahead_point: look-ahead distance must be > 0");
  const auto& w = path.waypoints();
  const auto& arc = path.arc();
  if (w.size() == 1) return {w.front(), 0, 0.0};

  progress = std::min(progress, w.size() - 2);
  // Only segments starting within 2L + 1 of the best match so far are searched, so a path that
  // folds back near itself cannot capture the robot further along.
  const double window = 2.0 * lookahead + 1.0;
  const Point2 p = pose.position();
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_seg = progress;
  double best_arc = arc[progress];
  for (std::size_t i = progress; i + 1 < w.size() && arc[i] <= best_arc + window; ++i) {
    const double ex = w[i + 1].x - w[i].x;
    const double ey = w[i + 1].y - w[i].y;
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0.0 ? ((p.x - w[i].x) * ex + (p.y - w[i].y) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = w[i].x + t * ex - p.x;
    const double qy = w[i].y + t * ey - p.y;
    const double d2 = qx * qx + qy * qy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best_seg = i;
      best_arc = arc[i] + t * (arc[i + 1] - arc[i]);
    }
  }
  return {path.point_at(best_arc + lookahead), best_seg, best_arc};
}

double compute_lookahead(const TrackerConfig& cfg, double current_v) {
  if (current_v < 0.0) throw std::invalid_argument("compute_lookahead: speed must be >= 0");
  return std::clamp(cfg.lookahead_gain * current_v, cfg.lookahead_min, cfg.lookahead_max);
}

VelocityCommand pursuit_command(const Pose& pose, const Point2& target, const TrackerConfig& cfg, double distance_to_goal) {
  const double dx = target.x - pose.x;
  const double dy = target.y - pose.y;
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  const double xl = c * dx + s * dy;
  const double yl = -s * dx + c * dy;
  const double l2 = xl * xl + yl * yl;
  if (l2 < 1e-12) return {};

  const double alpha = std::atan2(yl, xl);
  if (std::abs(alpha) > std::numbers::pi / 2.0) return {0.0, std::copysign(cfg.omega_max, alpha)};

  const double curvature = 2.0 * yl / l2;
  const double taper = std::min(1.0, distance_to_goal / (2.0 * cfg.goal_tolerance));
  double v = cfg.v_max * taper;
  // Slow down rather than clip the turn rate: a clipped turn flies a wider arc than asked for,
  // and near the goal that arc can circle it forever.
  if (std::abs(curvature) * v > cfg.omega_max) v = cfg.omega_max / std::abs(curvature);
  return {v, std::clamp(curvature * v, -cfg.omega_max, cfg.omega_max)};
}

PurePursuit::PurePursuit(const TrackerConfig& cfg, TrackedPath path) : cfg_(cfg), path_(std::move(path)) {
  cfg_.validate();
  if (path_.empty()) throw std::invalid_argument("PurePursuit: empty path");
}

VelocityCommand PurePursuit::update(const Pose& pose, double current_v) {
  const auto la = lookahead_point(path_, pose, compute_lookahead(cfg_, std::max(0.0, current_v)), progress_);
  progress_ = std::max(progress_, la.progress);
  closest_arc_ = la.closest_arc;
  const double to_goal = std::max(distance(pose.position(), path_.waypoints().back()), path_.length() - closest_arc_);
  return pursuit_command(pose, la.point, cfg_, to_goal);
}

bool PurePursuit::reached(const Pose& pose) const {
  return distance(pose.position(), path_.waypoints().back()) <= cfg_.goal_tolerance;
}

}  // namespace hexplore
