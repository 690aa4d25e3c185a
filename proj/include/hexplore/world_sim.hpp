#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hexplore/geometry.hpp"
#include "hexplore/grid.hpp"

namespace hexplore {

/// Thrown for malformed text inputs; carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Ground-truth binary world.
struct WorldGrid {
  GridGeometry geometry;
  std::vector<std::uint8_t> occupied;  // 1 = occupied, row-major from iy = 0
  Cell start_cell;
  Pose start;

  bool is_occupied(const Cell& c) const { return !geometry.contains(c) || occupied[geometry.index(c)] != 0; }
};

/// Parses the world text format: `width height cell_size`, then `height` rows of `#`, `.` or `S`,
/// first row at maximum y. Exactly one `S`; the robot starts at its centre facing +x.
WorldGrid load_world(std::string_view text);
WorldGrid load_world_file(const std::string& path);

struct VelocityLimits {
  double v_max{1.5};
  double omega_max{1.57};
};

struct VelocityCommand {
  double v{0.0};
  double omega{0.0};
};

struct KinematicStep {
  Pose pose;
  bool saturated{false};  // command exceeded the limits and was clamped
};

/// Exact-arc unicycle integration over dt. Out-of-limit commands are clamped and flagged.
KinematicStep step_kinematics(const Pose& pose, const VelocityCommand& cmd, double dt,
                              const VelocityLimits& limits = {});

struct Beam {
  double bearing{0.0};  // relative to the scan heading
  double range{0.0};
  bool hit{false};
};

struct LidarScan {
  Pose origin;
  double max_range{0.0};
  std::vector<Beam> beams;
};

/// 360 degree planar scan with `n_beams` uniformly spaced bearings starting at the pose heading.
/// Cells outside the grid count as occupied.
LidarScan simulate_scan(const WorldGrid& world, const Pose& pose, int n_beams, double max_range);

struct DriftModel {
  double sigma_per_meter{0.0};
  std::uint64_t seed{0};
};

/// Seeded Gaussian random walk on position: each update adds N(0, (sigma * distance_delta)^2)
/// per axis to an accumulated offset, and the estimate is truth plus that offset.
class DriftAccumulator {
 public:
  explicit DriftAccumulator(const DriftModel& model);

  Pose apply(const Pose& truth, double distance_delta);
  Point2 offset() const { return offset_; }

 private:
  DriftModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  Point2 offset_{};
};

}  // namespace hexplore
