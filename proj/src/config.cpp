#include "hexplore/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hexplore/mapping.hpp"

namespace hexplore {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_value(std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw std::invalid_argument("not a number: " + std::string(v));
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean: " + std::string(v));
}

using Setter = std::function<void(EpisodeConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"world", [](EpisodeConfig& c, std::string_view v) { c.world_path = std::string(v); }},
      {"seed", [](EpisodeConfig& c, std::string_view v) { c.seed = parse_value<std::uint64_t>(v); }},
      {"n_beams", [](EpisodeConfig& c, std::string_view v) { c.sensor.n_beams = parse_value<int>(v); }},
      {"max_range", [](EpisodeConfig& c, std::string_view v) { c.sensor.max_range = parse_value<double>(v); }},
      {"scan_period", [](EpisodeConfig& c, std::string_view v) { c.sensor.scan_period = parse_value<double>(v); }},
      {"robot_radius", [](EpisodeConfig& c, std::string_view v) { c.planner.local.robot_radius = parse_value<double>(v); }},
      {"horizon_half_side", [](EpisodeConfig& c, std::string_view v) { c.planner.local.half_side = parse_value<double>(v); }},
      {"gain_range", [](EpisodeConfig& c, std::string_view v) { c.planner.local.sensor_range = parse_value<double>(v); }},
      {"stride", [](EpisodeConfig& c, std::string_view v) { c.planner.local.stride = parse_value<int>(v); }},
      {"target_candidates", [](EpisodeConfig& c, std::string_view v) { c.planner.local.target_candidates = parse_value<int>(v); }},
      {"min_gain", [](EpisodeConfig& c, std::string_view v) { c.planner.local.min_gain = parse_value<std::size_t>(v); }},
      {"max_projection", [](EpisodeConfig& c, std::string_view v) { c.planner.local.max_projection = parse_value<int>(v); }},
      {"sampling",
       [](EpisodeConfig& c, std::string_view v) {
         if (v != "uniform" && v != "random") throw std::invalid_argument("sampling must be uniform or random");
         c.planner.local.random_sampling = v == "random";
       }},
      {"region_size", [](EpisodeConfig& c, std::string_view v) { c.planner.region_size = parse_value<double>(v); }},
      {"dormant_after", [](EpisodeConfig& c, std::string_view v) { c.planner.dormant_after = parse_value<int>(v); }},
      {"replan_period", [](EpisodeConfig& c, std::string_view v) { c.planner.replan_period = parse_value<double>(v); }},
      {"lookahead_gain", [](EpisodeConfig& c, std::string_view v) { c.tracker.lookahead_gain = parse_value<double>(v); }},
      {"lookahead_min", [](EpisodeConfig& c, std::string_view v) { c.tracker.lookahead_min = parse_value<double>(v); }},
      {"lookahead_max", [](EpisodeConfig& c, std::string_view v) { c.tracker.lookahead_max = parse_value<double>(v); }},
      {"v_max", [](EpisodeConfig& c, std::string_view v) { c.tracker.v_max = parse_value<double>(v); }},
      {"omega_max", [](EpisodeConfig& c, std::string_view v) { c.tracker.omega_max = parse_value<double>(v); }},
      {"goal_tolerance", [](EpisodeConfig& c, std::string_view v) { c.tracker.goal_tolerance = parse_value<double>(v); }},
      {"drift_sigma_per_meter", [](EpisodeConfig& c, std::string_view v) { c.drift_sigma_per_meter = parse_value<double>(v); }},
      {"dt", [](EpisodeConfig& c, std::string_view v) { c.dt = parse_value<double>(v); }},
      {"max_sim_time", [](EpisodeConfig& c, std::string_view v) { c.max_sim_time = parse_value<double>(v); }},
      {"nominal_height", [](EpisodeConfig& c, std::string_view v) { c.nominal_height = parse_value<double>(v); }},
      {"stuck_timeout", [](EpisodeConfig& c, std::string_view v) { c.stuck_timeout = parse_value<double>(v); }},
      {"home_time_limit", [](EpisodeConfig& c, std::string_view v) { c.home_time_limit = parse_value<double>(v); }},
      {"go_home", [](EpisodeConfig& c, std::string_view v) { c.go_home = parse_bool(v); }},
      {"plan_timing",
       [](EpisodeConfig& c, std::string_view v) {
         if (v == "wall") {
           c.plan_timing = PlanTiming::wall;
         } else if (v == "none") {
           c.plan_timing = PlanTiming::none;
         } else {
           throw std::invalid_argument("plan_timing must be wall or none");
         }
       }},
  };
  return table;
}

}  // namespace

void EpisodeConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(max_sim_time > 0.0)) throw std::invalid_argument("max_sim_time must be > 0");
  if (!(nominal_height > 0.0)) throw std::invalid_argument("nominal_height must be > 0");
  if (sensor.n_beams < 4) throw std::invalid_argument("n_beams must be >= 4");
  if (!(sensor.max_range > 0.0)) throw std::invalid_argument("max_range must be > 0");
  if (sensor.scan_period < dt) throw std::invalid_argument("scan_period must be >= dt");
  if (!(planner.local.half_side > 0.0)) throw std::invalid_argument("horizon_half_side must be > 0");
  if (!(planner.local.sensor_range > 0.0)) throw std::invalid_argument("gain_range must be > 0");
  if (planner.local.robot_radius < 0.0) throw std::invalid_argument("robot_radius must be >= 0");
  if (planner.local.stride < 0) throw std::invalid_argument("stride must be >= 0 (0 = automatic)");
  if (planner.local.max_projection < 0) throw std::invalid_argument("max_projection must be >= 0");
  if (!(planner.region_size > 0.0)) throw std::invalid_argument("region_size must be > 0");
  if (planner.dormant_after < 1) throw std::invalid_argument("dormant_after must be >= 1");
  if (!(planner.replan_period > 0.0)) throw std::invalid_argument("replan_period must be > 0");
  if (drift_sigma_per_meter < 0.0) throw std::invalid_argument("drift_sigma_per_meter must be >= 0");
  if (!(stuck_timeout > 0.0)) throw std::invalid_argument("stuck_timeout must be > 0");
  tracker.validate();
}

EpisodeConfig parse_config(std::string_view text, const std::string& base_dir) {
  EpisodeConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected `key = value`");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(line_no, "unknown key `" + std::string(key) + "`");
    if (!seen.insert(std::string(key)).second) throw ParseError(line_no, "duplicate key `" + std::string(key) + "`");
    if (value.empty()) throw ParseError(line_no, "empty value for `" + std::string(key) + "`");
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, std::string(key) + ": " + e.what());
    }
  }
  if (!cfg.world_path.empty() && !base_dir.empty() && std::filesystem::path(cfg.world_path).is_relative()) {
    cfg.world_path = (std::filesystem::path(base_dir) / cfg.world_path).lexically_normal().string();
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, e.what());
  }
  return cfg;
}

EpisodeConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string to_text(const EpisodeConfig& c) {
  std::ostringstream o;
  auto num = [](double v) { return format_decimal(v); };
  if (!c.world_path.empty()) o << "world = " << c.world_path << "\n";
  o << "seed = " << c.seed << "\n"
    << "n_beams = " << c.sensor.n_beams << "\n"
    << "max_range = " << num(c.sensor.max_range) << "\n"
    << "scan_period = " << num(c.sensor.scan_period) << "\n"
    << "robot_radius = " << num(c.planner.local.robot_radius) << "\n"
    << "horizon_half_side = " << num(c.planner.local.half_side) << "\n"
    << "gain_range = " << num(c.planner.local.sensor_range) << "\n"
    << "stride = " << c.planner.local.stride << "\n"
    << "target_candidates = " << c.planner.local.target_candidates << "\n"
    << "min_gain = " << c.planner.local.min_gain << "\n"
    << "max_projection = " << c.planner.local.max_projection << "\n"
    << "sampling = " << (c.planner.local.random_sampling ? "random" : "uniform") << "\n"
    << "region_size = " << num(c.planner.region_size) << "\n"
    << "dormant_after = " << c.planner.dormant_after << "\n"
    << "replan_period = " << num(c.planner.replan_period) << "\n"
    << "lookahead_gain = " << num(c.tracker.lookahead_gain) << "\n"
    << "lookahead_min = " << num(c.tracker.lookahead_min) << "\n"
    << "lookahead_max = " << num(c.tracker.lookahead_max) << "\n"
    << "v_max = " << num(c.tracker.v_max) << "\n"
    << "omega_max = " << num(c.tracker.omega_max) << "\n"
    << "goal_tolerance = " << num(c.tracker.goal_tolerance) << "\n"
    << "drift_sigma_per_meter = " << num(c.drift_sigma_per_meter) << "\n"
    << "dt = " << num(c.dt) << "\n"
    << "max_sim_time = " << num(c.max_sim_time) << "\n"
    << "nominal_height = " << num(c.nominal_height) << "\n"
    << "stuck_timeout = " << num(c.stuck_timeout) << "\n"
    << "home_time_limit = " << num(c.home_time_limit) << "\n"
    << "go_home = " << (c.go_home ? "true" : "false") << "\n"
    << "plan_timing = " << (c.plan_timing == PlanTiming::wall ? "wall" : "none") << "\n";
  return o.str();
}

}  // namespace hexplore
