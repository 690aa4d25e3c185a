#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hexplore/geometry.hpp"

namespace hexplore {

enum class EpisodeStatus { complete, timeout, stuck };

const char* to_string(EpisodeStatus s);

/// One planning iteration.
struct MetricRow {
  double t_s{0.0};
  double explored_m3{0.0};
  double explored_pct{0.0};
  double distance_m{0.0};
  double plan_runtime_s{0.0};
};

struct EpisodeSummary {
  EpisodeStatus status{EpisodeStatus::timeout};
  double exploration_time_s{0.0};
  double plan_runtime_mean_s{0.0};
  double plan_runtime_sd_s{0.0};
  double explored_m3{0.0};
  double explored_pct{0.0};
  double distance_m{0.0};
  std::optional<double> localization_error_m;
};

struct EpisodeMetrics {
  std::vector<MetricRow> rows;
  EpisodeSummary summary;
};

/// Summary fields that follow from the rows: time, explored and distance from the last row,
/// runtime mean and sample standard deviation over all rows.
EpisodeSummary summary_from_rows(std::span<const MetricRow> rows, EpisodeStatus status,
                                 std::optional<double> localization_error);

inline constexpr std::string_view kMetricsHeader = "t_s,explored_m3,explored_pct,distance_m,plan_runtime_s";

/// Header, one row per iteration with 6 decimals, then a `# summary:` comment block.
std::string write_metrics_csv(const EpisodeMetrics& m);
EpisodeMetrics parse_metrics_csv(std::string_view text);

/// Distance between where odometry believes the robot is and where it truly is, taken when the
/// robot is back at its start.
double localization_error(const Pose& estimated_end, const Pose& true_start);

struct MeanSd {
  double mean{0.0};
  double sd{0.0};  // sample standard deviation, 0 for a single value
  std::size_t n{0};
};

MeanSd mean_sd(std::span<const double> values);

struct SummaryTable {
  std::vector<EpisodeSummary> runs;
  MeanSd exploration_time_s;
  MeanSd plan_runtime_s;  // over the per-run means
  MeanSd explored_m3;
  MeanSd explored_pct;
  MeanSd distance_m;
  MeanSd localization_error_m;  // over runs that report it; n == 0 when none do
};

/// Throws std::invalid_argument on an empty input.
SummaryTable summarize(std::span<const EpisodeMetrics> runs);

/// Text table with one row per run and an `Overall` row in mean±sd form.
std::string format_summary_table(const SummaryTable& table);

}  // namespace hexplore
