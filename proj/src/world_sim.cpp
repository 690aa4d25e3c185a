#include "hexplore/world_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hexplore/raycast.hpp"

namespace hexplore {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    pos = end + 1;
  }
  // A trailing newline leaves one empty element behind.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

template <class T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

WorldGrid load_world(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "missing header");

  const auto header = split_ws(lines[0]);
  WorldGrid w;
  auto& g = w.geometry;
  if (header.size() != 3 || !parse_number(header[0], g.width) || !parse_number(header[1], g.height) ||
      !parse_number(header[2], g.cell_size)) {
    throw ParseError(1, "header must be `width height cell_size`");
  }
  if (g.width < 1 || g.height < 1 || !(g.cell_size > 0.0) || !std::isfinite(g.cell_size)) {
    throw ParseError(1, "width and height must be >= 1 and cell_size > 0");
  }

  w.occupied.assign(g.cell_count(), 0);
  bool have_start = false;
  for (int r = 0; r < g.height; ++r) {
    const int line_no = r + 2;
    if (static_cast<std::size_t>(r + 1) >= lines.size()) {
      throw ParseError(line_no, "expected " + std::to_string(g.height) + " rows, got " + std::to_string(r));
    }
    const std::string_view row = lines[static_cast<std::size_t>(r + 1)];
    if (row.size() != static_cast<std::size_t>(g.width)) {
      throw ParseError(line_no, "ragged row: length " + std::to_string(row.size()) + ", expected " +
                                    std::to_string(g.width));
    }
    const int iy = g.height - 1 - r;
    for (int ix = 0; ix < g.width; ++ix) {
      const char ch = row[static_cast<std::size_t>(ix)];
      const Cell c{ix, iy};
      switch (ch) {
        case '#':
          w.occupied[g.index(c)] = 1;
          break;
        case '.':
          break;
        case 'S':
          if (have_start) throw ParseError(line_no, "duplicate start marker 'S'");
          have_start = true;
          w.start_cell = c;
          break;
        default:
          throw ParseError(line_no, std::string("unknown character '") + ch + "'");
      }
    }
  }
  if (lines.size() > static_cast<std::size_t>(g.height) + 1) {
    throw ParseError(g.height + 2, "extra content after the last row");
  }
  if (!have_start) throw ParseError(static_cast<int>(lines.size()), "missing start marker 'S'");

  const Point2 s = g.center(w.start_cell);
  w.start = Pose(s.x, s.y, 0.0);
  return w;
}

WorldGrid load_world_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_world(ss.str());
}

KinematicStep step_kinematics(const Pose& pose, const VelocityCommand& cmd, double dt, const VelocityLimits& limits) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_kinematics: dt must be > 0");
  KinematicStep out;
  const double v = std::clamp(cmd.v, -limits.v_max, limits.v_max);
  const double w = std::clamp(cmd.omega, -limits.omega_max, limits.omega_max);
  out.saturated = v != cmd.v || w != cmd.omega;

  const double th = pose.theta;
  if (std::abs(w) < 1e-9) {
    out.pose = Pose(pose.x + v * dt * std::cos(th), pose.y + v * dt * std::sin(th), th + w * dt);
  } else {
    const double r = v / w;
    const double th1 = th + w * dt;
    out.pose = Pose(pose.x + r * (std::sin(th1) - std::sin(th)), pose.y - r * (std::cos(th1) - std::cos(th)), th1);
  }
  return out;
}

LidarScan simulate_scan(const WorldGrid& world, const Pose& pose, int n_beams, double max_range) {
  if (n_beams < 4) throw std::invalid_argument("simulate_scan: need at least 4 beams");
  if (!(max_range > 0.0)) throw std::invalid_argument("simulate_scan: max_range must be > 0");
  const auto& g = world.geometry;
  if (world.is_occupied(g.cell_of(pose.position()))) {
    throw std::invalid_argument("simulate_scan: pose lies in an occupied cell (robot in collision)");
  }

  LidarScan scan;
  scan.origin = pose;
  scan.max_range = max_range;
  scan.beams.reserve(static_cast<std::size_t>(n_beams));
  const double step = 2.0 * std::numbers::pi / n_beams;
  for (int i = 0; i < n_beams; ++i) {
    Beam b;
    b.bearing = i * step;
    b.range = max_range;
    traverse_ray(g, pose.position(), pose.theta + b.bearing, max_range, [&](const Cell& c, double t_enter) {
      if (t_enter > max_range) return false;
      if (world.is_occupied(c)) {
        if (t_enter > 0.0) {
          b.range = t_enter;
          b.hit = true;
        }
        return false;
      }
      return true;
    });
    scan.beams.push_back(b);
  }
  return scan;
}

DriftAccumulator::DriftAccumulator(const DriftModel& model) : model_(model), rng_(model.seed) {
  if (model.sigma_per_meter < 0.0) throw std::invalid_argument("DriftModel: sigma_per_meter must be >= 0");
}

Pose DriftAccumulator::apply(const Pose& truth, double distance_delta) {
  if (distance_delta < 0.0) throw std::invalid_argument("apply_drift: distance_delta must be >= 0");
  if (model_.sigma_per_meter > 0.0 && distance_delta > 0.0) {
    const double sd = model_.sigma_per_meter * distance_delta;
    offset_.x += sd * normal_(rng_);
    offset_.y += sd * normal_(rng_);
  }
  return Pose(truth.x + offset_.x, truth.y + offset_.y, truth.theta);
}

}  // namespace hexplore
