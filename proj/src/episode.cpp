#include "hexplore/episode.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <set>

#include "hexplore/local_planner.hpp"
#include "hexplore/path_search.hpp"
#include "hexplore/tracker.hpp"

namespace hexplore {

namespace {

enum class PlanKind { local, global, complete, none };

// A stretch of path tracked on its own: up to the next viewpoint, or a whole global route.
struct Leg {
  std::vector<Cell> cells;
  std::optional<Viewpoint> viewpoint;
  std::optional<Point2> exact_end;  // appended after the last cell centre
};

struct PlanResult {
  PlanKind kind{PlanKind::none};
  std::vector<Leg> legs;
};

// Distance (m) from a region goal within which the robot counts as having arrived.
constexpr double kArriveTolerance = 0.75;

long ticks_for(double seconds, double dt) { return std::max(1L, std::lround(seconds / dt)); }

class EpisodeRunner {
 public:
  EpisodeRunner(const EpisodeConfig& cfg, const WorldGrid& world, const TickObserver& observer)
      : cfg_(cfg),
        world_(world),
        observer_(observer),
        reachable_(reachable_free(world)),
        map_(world.geometry),
        global_(cfg.planner.region_size, cfg.planner.dormant_after, kArriveTolerance, cfg.planner.local.max_projection),
        drift_(DriftModel{cfg.drift_sigma_per_meter, cfg.seed}),
        sampling_rng_(cfg.seed ^ 0x9E3779B97F4A7C15ULL),
        pose_(world.start),
        estimate_(world.start),
        // Built once up front so the first planning iteration does not pay for it.
        rays_(RayTree::for_range(cfg.planner.local.sensor_range / world.geometry.cell_size)) {}

  EpisodeOutcome run() {
    try {
      out_.status = explore();
    } catch (const std::exception& e) {
      out_.status = EpisodeStatus::stuck;
      out_.diagnostics = std::string("planning failed: ") + e.what();
    }
    std::optional<double> loc_error;
    if (out_.status == EpisodeStatus::complete && cfg_.go_home) {
      try {
        loc_error = go_home();
      } catch (const std::exception& e) {
        out_.diagnostics = std::string("return to start failed: ") + e.what();
      }
    }
    finish(loc_error);
    return std::move(out_);
  }

 private:
  EpisodeStatus explore() {
    const long scan_every = ticks_for(cfg_.sensor.scan_period, cfg_.dt);
    const long replan_every = ticks_for(cfg_.planner.replan_period, cfg_.dt);
    const long max_ticks = static_cast<long>(std::floor(cfg_.max_sim_time / cfg_.dt + 1e-9));
    const long stuck_ticks = ticks_for(cfg_.stuck_timeout, cfg_.dt);

    bool need_replan = true;
    long last_plan_tick = 0;
    long progress_tick = 0;
    std::size_t progress_known = 0;
    Pose progress_pose = pose_;
    std::optional<EpisodeStatus> status;

    for (long tick = 0;; ++tick) {
      const double t = static_cast<double>(tick) * cfg_.dt;
      if (tick >= max_ticks) {
        status = EpisodeStatus::timeout;
        break;
      }
      const bool scan_tick = tick % scan_every == 0;
      if (scan_tick) {
        integrate_scan(map_, simulate_scan(world_, pose_, cfg_.sensor.n_beams, cfg_.sensor.max_range));
        if (tracker_ && path_blocked()) need_replan = true;
      }

      if (!tracker_ && scan_tick) need_replan = true;
      if (need_replan || tick - last_plan_tick >= replan_every) {
        auto result = timed_plan(t);
        last_plan_tick = tick;
        need_replan = false;
        if (result.kind == PlanKind::complete) {
          status = EpisodeStatus::complete;
          break;
        }
        start_tracking(std::move(result));
      }

      const VelocityCommand cmd = track(need_replan);
      advance(cmd, t, false, need_replan);

      if (map_.known_count() != progress_known || distance(pose_.position(), progress_pose.position()) > 0.05) {
        progress_known = map_.known_count();
        progress_pose = pose_;
        progress_tick = tick;
      } else if (tick - progress_tick >= stuck_ticks) {
        status = EpisodeStatus::stuck;
        out_.diagnostics = "no map or pose progress for " + format_decimal(cfg_.stuck_timeout) + " s at t=" +
                           format_decimal(t);
        break;
      }
    }

    return *status;
  }

  PlanResult timed_plan(double t) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = plan();
    const auto t1 = std::chrono::steady_clock::now();
    const double runtime =
        cfg_.plan_timing == PlanTiming::wall ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
    const auto cov = coverage(map_, world_, reachable_, cfg_.nominal_height);
    out_.metrics.rows.push_back({t, cov.explored_volume, cov.explored_pct, traveled_, runtime});
    return result;
  }

  PlanResult plan() {
    PlanResult r;
    const auto frontiers = detect_frontiers(map_);
    const Traversability trav(map_, cfg_.planner.local.robot_radius);
    const auto start = planning_start(trav);
    if (!start) return r;

    const auto local = plan_local(map_, trav, *start, pose_, frontiers, cfg_.planner.local, visited_, &sampling_rng_,
                                  committed_viewpoint());
    if (!local.empty()) {
      global_.local_plan_found(*start);
      r.kind = PlanKind::local;
      // Tracking the tour leg by leg keeps pursuit from shortcutting a viewpoint whose
      // approach and departure share cells.
      std::size_t begin = 0;
      for (std::size_t k = 0; k < local.viewpoints.size(); ++k) {
        const std::size_t end = local.stops[k];
        Leg leg;
        leg.cells.assign(local.path.begin() + static_cast<std::ptrdiff_t>(begin),
                         local.path.begin() + static_cast<std::ptrdiff_t>(end) + 1);
        leg.viewpoint = local.viewpoints[k];
        r.legs.push_back(std::move(leg));
        begin = end;
      }
      return r;
    }

    if (auto route = global_.plan(map_, trav, *start)) {
      r.kind = PlanKind::global;
      r.legs.push_back(Leg{std::move(route->path.cells), std::nullopt, std::nullopt});
      return r;
    }

    const auto dist = distance_field(trav, *start);
    const auto live = reachable_frontiers(frontiers, global_.regions(), map_, trav, dist, cfg_.planner.local.max_projection);
    if (is_exploration_complete(global_.regions(), live)) r.kind = PlanKind::complete;
    return r;
  }

  // The viewpoint being driven to, as long as each replan finds the robot closer to it than the
  // one before; without progress the next plan is free to choose again.
  const Viewpoint* committed_viewpoint() {
    if (!tracker_ || leg_ >= legs_.size() || !legs_[leg_].viewpoint) return nullptr;
    const Viewpoint& vp = *legs_[leg_].viewpoint;
    const double remaining = tracker_->path().length() - tracker_->closest_arc();
    if (commit_cell_ == vp.cell && remaining > commit_remaining_ - kCommitProgress) {
      commit_cell_.reset();
      return nullptr;
    }
    commit_cell_ = vp.cell;
    commit_remaining_ = remaining;
    return &vp;
  }

  std::optional<Cell> planning_start(const Traversability& trav) const {
    const Cell here = map_.geometry().cell_of(pose_.position());
    if (trav.ok(here)) return here;
    return trav.nearest_ok(here, 8);
  }

  void start_tracking(PlanResult result) {
    legs_ = std::move(result.legs);
    leg_ = 0;
    start_leg();
  }

  // Points the tracker at legs_[leg_], or clears it once every leg is done.
  void start_leg() {
    tracker_.reset();
    if (leg_ >= legs_.size()) return;
    const auto& g = map_.geometry();
    const Leg& leg = legs_[leg_];
    std::vector<Point2> waypoints;
    waypoints.reserve(leg.cells.size() + 1);
    for (const auto& c : leg.cells) waypoints.push_back(g.center(c));
    if (leg.exact_end) waypoints.push_back(*leg.exact_end);
    tracker_.emplace(cfg_.tracker, TrackedPath(std::move(waypoints)));
  }

  bool path_blocked() const {
    for (std::size_t k = leg_; k < legs_.size(); ++k) {
      const auto& cells = legs_[k].cells;
      for (std::size_t i = k == leg_ ? tracker_->progress() : 0; i < cells.size(); ++i) {
        if (map_.at(cells[i]) == CellState::occupied) return true;
      }
    }
    return false;
  }

  VelocityCommand track(bool& need_replan) {
    if (!tracker_) return {};
    while (tracker_ && tracker_->reached(pose_)) {
      if (legs_[leg_].viewpoint) visited_.insert(legs_[leg_].viewpoint->cell);
      ++leg_;
      start_leg();
    }
    if (!tracker_) {
      need_replan = true;
      return {};
    }
    return tracker_->update(pose_, current_v_);
  }

  void advance(const VelocityCommand& cmd, double t, bool homing, bool& need_replan) {
    const auto step = step_kinematics(pose_, cmd, cfg_.dt, {cfg_.tracker.v_max, cfg_.tracker.omega_max});
    double moved = std::abs(cmd.v) * cfg_.dt;
    if (step.saturated) {
      ++out_.saturated_commands;
      moved = std::min(moved, cfg_.tracker.v_max * cfg_.dt);
    }
    out_.max_abs_v = std::max(out_.max_abs_v, std::min(std::abs(cmd.v), cfg_.tracker.v_max));
    out_.max_abs_omega = std::max(out_.max_abs_omega, std::min(std::abs(cmd.omega), cfg_.tracker.omega_max));

    const auto free_at = [&](double x, double y) { return !world_.is_occupied(world_.geometry.cell_of({x, y})); };
    if (free_at(step.pose.x, step.pose.y)) {
      blocked_run_ = 0;
      pose_ = step.pose;
      current_v_ = std::abs(cmd.v);
    } else {
      // Contact: keep the turn, and slide along whichever axis stays free.
      ++out_.blocked_steps;
      const Point2 from = pose_.position();
      Point2 to = from;
      if (free_at(step.pose.x, from.y)) {
        to.x = step.pose.x;
      } else if (free_at(from.x, step.pose.y)) {
        to.y = step.pose.y;
      }
      moved = distance(from, to);
      pose_ = Pose(to.x, to.y, step.pose.theta);
      current_v_ = moved / cfg_.dt;
      if (++blocked_run_ >= kBlockedReplan) {
        blocked_run_ = 0;
        need_replan = true;
      }
    }
    traveled_ += homing ? 0.0 : moved;
    estimate_ = drift_.apply(pose_, moved);
    if (world_.is_occupied(world_.geometry.cell_of(pose_.position()))) ++out_.collision_ticks;
    ++out_.ticks;
    if (observer_) observer_(TickInfo{t, pose_, estimate_, cmd, homing});
  }

  // Drives back to the start cell; returns the localization error on arrival.
  std::optional<double> go_home() {
    const long home_ticks = ticks_for(cfg_.home_time_limit, cfg_.dt);
    bool need_replan = true;
    double t = out_.metrics.rows.empty() ? 0.0 : out_.metrics.rows.back().t_s;
    for (long tick = 0; tick < home_ticks; ++tick, t += cfg_.dt) {
      if (need_replan) {
        need_replan = false;
        const Traversability trav(map_, cfg_.planner.local.robot_radius);
        const auto start = planning_start(trav);
        const auto goal = trav.nearest_ok(world_.start_cell, 8);
        if (!start || !goal) return std::nullopt;
        auto path = shortest_path(trav, *start, *goal);
        if (!path) return std::nullopt;
        PlanResult home;
        home.legs.push_back(Leg{std::move(path->cells), std::nullopt, world_.start.position()});
        start_tracking(std::move(home));
      }
      if (tracker_->reached(pose_)) {
        out_.returned_home = true;
        // What odometry reports while the robot stands on its start point.
        const Pose believed(world_.start.x + (estimate_.x - pose_.x), world_.start.y + (estimate_.y - pose_.y), 0.0);
        return localization_error(believed, world_.start);
      }
      const auto cmd = tracker_->update(pose_, current_v_);
      advance(cmd, t, true, need_replan);
    }
    return std::nullopt;
  }

  void finish(std::optional<double> loc_error) {
    const auto& regions = global_.update(map_);
    out_.final_regions = regions;
    const Traversability trav(map_, cfg_.planner.local.robot_radius);
    if (const auto start = planning_start(trav)) {
      const auto dist = distance_field(trav, *start);
      out_.final_reachable_frontiers =
          reachable_frontiers(detect_frontiers(map_), regions, map_, trav, dist, cfg_.planner.local.max_projection).size();
    }
    out_.metrics.summary = summary_from_rows(out_.metrics.rows, out_.status, loc_error);
    out_.final_map = map_;
    out_.final_true_pose = pose_;
    out_.final_estimated_pose = estimate_;
  }

  const EpisodeConfig& cfg_;
  const WorldGrid& world_;
  const TickObserver& observer_;
  std::vector<std::uint8_t> reachable_;
  OccupancyGrid map_;
  GlobalPlanner global_;
  DriftAccumulator drift_;
  std::mt19937_64 sampling_rng_;
  Pose pose_;
  Pose estimate_;
  std::shared_ptr<const RayTree> rays_;
  static constexpr int kBlockedReplan = 20;
  static constexpr double kCommitProgress = 0.5;  // m
  std::optional<Cell> commit_cell_;
  double commit_remaining_{0.0};
  int blocked_run_{0};
  double current_v_{0.0};
  double traveled_{0.0};
  std::optional<PurePursuit> tracker_;
  std::vector<Leg> legs_;
  std::size_t leg_{0};
  std::set<Cell> visited_;
  EpisodeOutcome out_;
};

}  // namespace

EpisodeOutcome run_episode(const EpisodeConfig& cfg, const WorldGrid& world, const TickObserver& observer) {
  cfg.validate();
  EpisodeRunner runner(cfg, world, observer);
  return runner.run();
}

EpisodeOutcome run_episode(const EpisodeConfig& cfg, const TickObserver& observer) {
  const WorldGrid world = load_world_file(cfg.world_path);
  return run_episode(cfg, world, observer);
}

}  // namespace hexplore
