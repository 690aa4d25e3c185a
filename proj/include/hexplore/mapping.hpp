#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hexplore/geometry.hpp"
#include "hexplore/grid.hpp"
#include "hexplore/world_sim.hpp"

namespace hexplore {

enum class CellState : std::uint8_t { unknown = 0, free = 1, occupied = 2 };

/// Tri-state occupancy map. Knowledge is monotone: no cell ever returns to unknown, and an
/// occupied cell stays occupied.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geometry_; }

  CellState at(const Cell& c) const { return states_[geometry_.index(c)]; }
  CellState at(std::size_t idx) const { return states_[idx]; }
  /// Out-of-bounds cells read as unknown.
  CellState at_or_unknown(const Cell& c) const { return geometry_.contains(c) ? at(c) : CellState::unknown; }

  bool is_free(const Cell& c) const { return geometry_.contains(c) && at(c) == CellState::free; }
  bool is_known(const Cell& c) const { return geometry_.contains(c) && at(c) != CellState::unknown; }

  /// Direct state write; refuses any transition that would lose knowledge.
  void set(const Cell& c, CellState s);

  std::size_t known_count() const { return known_count_; }
  const std::vector<CellState>& states() const { return states_; }

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.geometry_.same_shape(b.geometry_) && a.states_ == b.states_;
  }

 private:
  GridGeometry geometry_;
  std::vector<CellState> states_;
  std::size_t known_count_{0};
};

/// Integrates one scan: cells a beam crosses before its hit become free, the hit cell becomes
/// occupied. Within one call an occupied mark beats a free one. Returns the number of cells whose
/// state changed.
std::size_t integrate_scan(OccupancyGrid& map, const LidarScan& scan);

struct FrontierCell {
  Cell cell;
  Point2 center;
};

/// Free cells with at least one unknown 4-neighbour, sorted by (iy, ix).
std::vector<FrontierCell> detect_frontiers(const OccupancyGrid& map);

bool is_frontier(const OccupancyGrid& map, const Cell& c);

struct CoverageReport {
  double explored_area{0.0};    // m^2
  double explored_volume{0.0};  // m^3, explored_area * nominal_height
  double explored_pct{0.0};     // % of the start cell's free component that is known
  std::size_t known_reachable{0};
  std::size_t reachable{0};
};

/// 4-connected free component of the world's start cell.
std::vector<std::uint8_t> reachable_free(const WorldGrid& world);

CoverageReport coverage(const OccupancyGrid& map, const WorldGrid& world, double nominal_height);
/// Same as above with a precomputed reachable mask (episodes call this every iteration).
CoverageReport coverage(const OccupancyGrid& map, const WorldGrid& world, const std::vector<std::uint8_t>& reachable,
                        double nominal_height);

/// Snapshot text: world-file header followed by rows of `?`, `.` and `#`, top row first.
std::string export_snapshot(const OccupancyGrid& map);
OccupancyGrid import_snapshot(std::string_view text);

std::string format_decimal(double v);

}  // namespace hexplore
