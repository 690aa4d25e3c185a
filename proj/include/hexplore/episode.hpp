#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hexplore/config.hpp"
#include "hexplore/global_planner.hpp"
#include "hexplore/mapping.hpp"
#include "hexplore/metrics.hpp"
#include "hexplore/world_sim.hpp"

namespace hexplore {

/// Per-tick view handed to an optional observer.
struct TickInfo {
  double t{0.0};
  Pose true_pose;
  Pose estimated_pose;
  VelocityCommand command;
  bool homing{false};
};

struct EpisodeOutcome {
  EpisodeStatus status{EpisodeStatus::timeout};
  OccupancyGrid final_map;
  std::vector<Region> final_regions;
  EpisodeMetrics metrics;
  std::string diagnostics;

  // Tick-level audit of the run.
  std::size_t ticks{0};
  double max_abs_v{0.0};
  double max_abs_omega{0.0};
  std::size_t saturated_commands{0};
  std::size_t blocked_steps{0};      // steps refused because they would enter an occupied cell
  std::size_t collision_ticks{0};    // ticks with the true pose inside an occupied cell; always 0
  std::size_t final_reachable_frontiers{0};
  bool returned_home{false};
  Pose final_true_pose;
  Pose final_estimated_pose;
};

using TickObserver = std::function<void(const TickInfo&)>;

/// Runs sense, map, plan, track and step at a fixed tick until exploration completes, time runs
/// out, or nothing changes for `stuck_timeout` seconds. After completion the robot drives back
/// to its start so the localization error can be taken. Deterministic for a given config.
EpisodeOutcome run_episode(const EpisodeConfig& cfg, const WorldGrid& world, const TickObserver& observer = {});
/// Loads cfg.world_path first; load errors propagate before any simulation.
EpisodeOutcome run_episode(const EpisodeConfig& cfg, const TickObserver& observer = {});

}  // namespace hexplore
