#include "hexplore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hexplore/world_sim.hpp"

namespace hexplore {

const char* to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::complete: return "complete";
    case EpisodeStatus::timeout: return "timeout";
    case EpisodeStatus::stuck: return "stuck";
  }
  return "?";
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

EpisodeStatus parse_status(const std::string& s, int line) {
  if (s == "complete") return EpisodeStatus::complete;
  if (s == "timeout") return EpisodeStatus::timeout;
  if (s == "stuck") return EpisodeStatus::stuck;
  throw ParseError(line, "unknown status `" + s + "`");
}

double parse_double(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "not a number: `" + s + "`");
  }
  if (used != s.size()) throw ParseError(line, "not a number: `" + s + "`");
  return v;
}

}  // namespace

MeanSd mean_sd(std::span<const double> values) {
  MeanSd r;
  r.n = values.size();
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

EpisodeSummary summary_from_rows(std::span<const MetricRow> rows, EpisodeStatus status,
                                 std::optional<double> localization_error) {
  EpisodeSummary s;
  s.status = status;
  s.localization_error_m = localization_error;
  if (rows.empty()) return s;
  const auto& last = rows.back();
  s.exploration_time_s = last.t_s;
  s.explored_m3 = last.explored_m3;
  s.explored_pct = last.explored_pct;
  s.distance_m = last.distance_m;
  std::vector<double> rt;
  rt.reserve(rows.size());
  for (const auto& r : rows) rt.push_back(r.plan_runtime_s);
  const auto ms = mean_sd(rt);
  s.plan_runtime_mean_s = ms.mean;
  s.plan_runtime_sd_s = ms.sd;
  return s;
}

std::string write_metrics_csv(const EpisodeMetrics& m) {
  std::string out(kMetricsHeader);
  out += "\n";
  for (const auto& r : m.rows) {
    out += fixed6(r.t_s) + "," + fixed6(r.explored_m3) + "," + fixed6(r.explored_pct) + "," + fixed6(r.distance_m) +
           "," + fixed6(r.plan_runtime_s) + "\n";
  }
  const auto& s = m.summary;
  out += "# summary:\n";
  out += std::string("# status = ") + to_string(s.status) + "\n";
  out += "# exploration_time_s = " + fixed6(s.exploration_time_s) + "\n";
  out += "# plan_runtime_mean_s = " + fixed6(s.plan_runtime_mean_s) + "\n";
  out += "# plan_runtime_sd_s = " + fixed6(s.plan_runtime_sd_s) + "\n";
  out += "# explored_m3 = " + fixed6(s.explored_m3) + "\n";
  out += "# explored_pct = " + fixed6(s.explored_pct) + "\n";
  out += "# distance_m = " + fixed6(s.distance_m) + "\n";
  out += "# localization_error_m = " + (s.localization_error_m ? fixed6(*s.localization_error_m) : std::string("absent")) + "\n";
  return out;
}

EpisodeMetrics parse_metrics_csv(std::string_view text) {
  EpisodeMetrics m;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line != kMetricsHeader) throw ParseError(1, "missing or wrong metrics header");
  std::map<std::string, std::string> summary;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos && line.size() > 2) summary[line.substr(2, eq - 2)] = line.substr(eq + 3);
      continue;
    }
    MetricRow r;
    double* fields[5] = {&r.t_s, &r.explored_m3, &r.explored_pct, &r.distance_m, &r.plan_runtime_s};
    std::istringstream ls(line);
    std::string tok;
    int k = 0;
    while (std::getline(ls, tok, ',')) {
      if (k >= 5) throw ParseError(line_no, "too many columns");
      *fields[k++] = parse_double(tok, line_no);
    }
    if (k != 5) throw ParseError(line_no, "expected 5 columns");
    m.rows.push_back(r);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = summary.find(key);
    if (it == summary.end()) throw ParseError(line_no, "summary block lacks `" + key + "`");
    return it->second;
  };
  auto& s = m.summary;
  s.status = parse_status(get("status"), line_no);
  s.exploration_time_s = parse_double(get("exploration_time_s"), line_no);
  s.plan_runtime_mean_s = parse_double(get("plan_runtime_mean_s"), line_no);
  s.plan_runtime_sd_s = parse_double(get("plan_runtime_sd_s"), line_no);
  s.explored_m3 = parse_double(get("explored_m3"), line_no);
  s.explored_pct = parse_double(get("explored_pct"), line_no);
  s.distance_m = parse_double(get("distance_m"), line_no);
  const auto& le = get("localization_error_m");
  if (le != "absent") s.localization_error_m = parse_double(le, line_no);
  return m;
}

double localization_error(const Pose& estimated_end, const Pose& true_start) {
  return std::hypot(estimated_end.x - true_start.x, estimated_end.y - true_start.y);
}

SummaryTable summarize(std::span<const EpisodeMetrics> runs) {
  if (runs.empty()) throw std::invalid_argument("summarize: no runs");
  SummaryTable t;
  std::vector<double> time, rt, vol, pct, dist, loc;
  for (const auto& r : runs) {
    const auto& s = r.summary;
    t.runs.push_back(s);
    time.push_back(s.exploration_time_s);
    rt.push_back(s.plan_runtime_mean_s);
    vol.push_back(s.explored_m3);
    pct.push_back(s.explored_pct);
    dist.push_back(s.distance_m);
    if (s.localization_error_m) loc.push_back(*s.localization_error_m);
  }
  t.exploration_time_s = mean_sd(time);
  t.plan_runtime_s = mean_sd(rt);
  t.explored_m3 = mean_sd(vol);
  t.explored_pct = mean_sd(pct);
  t.distance_m = mean_sd(dist);
  t.localization_error_m = mean_sd(loc);
  return t;
}

namespace {

std::string fmt(const char* spec, double v) {
  char b[64];
  std::snprintf(b, sizeof(b), spec, v);
  return b;
}

std::string pm(const MeanSd& m, const char* spec) { return fmt(spec, m.mean) + "\xC2\xB1" + fmt(spec, m.sd); }

// Display width in code points; the ± sign is two bytes.
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

}  // namespace

std::string format_summary_table(const SummaryTable& t) {
  std::vector<std::vector<std::string>> rows{{"Test", "Exploration Time (s)", "Runtime (s)", "Explored Volume (m3)",
                                              "Traveling Distance (m)", "Localization Error (m)", "Status"}};
  int i = 1;
  for (const auto& s : t.runs) {
    rows.push_back({std::to_string(i++), fmt("%.2f", s.exploration_time_s),
                    fmt("%.4f", s.plan_runtime_mean_s) + "\xC2\xB1" + fmt("%.4f", s.plan_runtime_sd_s),
                    fmt("%.2f", s.explored_m3) + "(" + fmt("%.2f", s.explored_pct) + "%)", fmt("%.2f", s.distance_m),
                    s.localization_error_m ? fmt("%.2f", *s.localization_error_m) : "absent", to_string(s.status)});
  }
  rows.push_back({"Overall", pm(t.exploration_time_s, "%.2f"), pm(t.plan_runtime_s, "%.4f"),
                  pm(t.explored_m3, "%.2f") + "(" + fmt("%.2f", t.explored_pct.mean) + "%)", pm(t.distance_m, "%.2f"),
                  t.localization_error_m.n > 0 ? pm(t.localization_error_m, "%.2f") : "absent", ""});

  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], display_width(r[c]));
  }
  std::ostringstream o;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size()) line += std::string(width[c] - display_width(r[c]), ' ') + " | ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    o << line << '\n';
  }
  return o.str();
}

}  // namespace hexplore
