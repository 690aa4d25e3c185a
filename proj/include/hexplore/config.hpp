#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "hexplore/local_planner.hpp"
#include "hexplore/tracker.hpp"
#include "hexplore/world_sim.hpp"

namespace hexplore {

struct SensorConfig {
  int n_beams{720};
  double max_range{15.0};
  double scan_period{0.1};
};

struct PlannerConfig {
  LocalPlannerConfig local;
  double region_size{10.0};
  int dormant_after{3};
  double replan_period{3.0};
};

enum class PlanTiming { wall, none };

struct EpisodeConfig {
  std::string world_path;
  std::uint64_t seed{0};
  SensorConfig sensor;
  PlannerConfig planner;
  TrackerConfig tracker;
  double drift_sigma_per_meter{0.0};
  double dt{0.05};
  double max_sim_time{1200.0};
  double nominal_height{3.0};
  double stuck_timeout{30.0};
  double home_time_limit{600.0};
  bool go_home{true};
  // `none` writes zero planning times so metrics files are byte-reproducible.
  PlanTiming plan_timing{PlanTiming::wall};

  void validate() const;
};

/// Flat `key = value` lines with `#` comments. Unknown keys, bad values and repeated keys are
/// ParseErrors. A relative `world` path is resolved against `base_dir`.
EpisodeConfig parse_config(std::string_view text, const std::string& base_dir = "");
EpisodeConfig load_config_file(const std::string& path);

/// The `key = value` form of a config; parse_config(to_text(c)) reproduces c.
std::string to_text(const EpisodeConfig& cfg);

}  // namespace hexplore
