// hexplore: exploration episode runner, seed sweeps, result tables and calibration kernels.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hexplore/calibration.hpp"
#include "hexplore/config.hpp"
#include "hexplore/episode.hpp"
#include "hexplore/metrics.hpp"

namespace fs = std::filesystem;
using namespace hexplore;

namespace {

constexpr int kExitConfigError = 1;

int exit_code(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::complete: return 0;
    case EpisodeStatus::timeout: return 2;
    case EpisodeStatus::stuck: return 3;
  }
  return kExitConfigError;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_outcome(const fs::path& dir, const EpisodeOutcome& o) {
  fs::create_directories(dir);
  write_file(dir / "metrics.csv", write_metrics_csv(o.metrics));
  write_file(dir / "final_map.txt", export_snapshot(o.final_map));
  write_file(dir / "regions.txt", region_dump(o.final_regions));
}

int run_explore(const std::string& config_path, const std::string& out_dir) {
  const auto cfg = load_config_file(config_path);
  const auto world = load_world_file(cfg.world_path);
  const auto outcome = run_episode(cfg, world);
  write_outcome(out_dir, outcome);
  const auto& s = outcome.metrics.summary;
  std::printf("status=%s time=%.2fs explored=%.2fm3 (%.2f%%) distance=%.2fm runtime=%.4f+-%.4fs", to_string(s.status),
              s.exploration_time_s, s.explored_m3, s.explored_pct, s.distance_m, s.plan_runtime_mean_s,
              s.plan_runtime_sd_s);
  if (s.localization_error_m) std::printf(" loc_error=%.4fm", *s.localization_error_m);
  std::printf("\n");
  if (!outcome.diagnostics.empty()) std::fprintf(stderr, "%s\n", outcome.diagnostics.c_str());
  return exit_code(s.status);
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& spec) {
  const auto dots = spec.find("..");
  try {
    if (dots == std::string::npos) {
      const auto v = std::stoull(spec);
      return {v, v};
    }
    const auto a = std::stoull(spec.substr(0, dots));
    const auto b = std::stoull(spec.substr(dots + 2));
    if (b < a) throw std::invalid_argument("empty range");
    return {a, b};
  } catch (const std::exception&) {
    throw std::invalid_argument("--seeds expects a..b, got `" + spec + "`");
  }
}

SummaryTable summarize_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() == "metrics.csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<EpisodeMetrics> runs;
  for (const auto& f : files) runs.push_back(parse_metrics_csv(read_file(f.string())));
  return summarize(runs);
}

int run_sweep(const std::string& config_path, const std::string& seeds, const std::string& out_dir, unsigned jobs) {
  const auto base = load_config_file(config_path);
  const auto world = load_world_file(base.world_path);
  const auto [first, last] = parse_seed_range(seeds);

  std::vector<std::uint64_t> all;
  for (auto s = first; s <= last; ++s) all.push_back(s);
  std::vector<EpisodeStatus> statuses(all.size(), EpisodeStatus::timeout);
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < all.size(); i = next++) {
      auto cfg = base;
      cfg.seed = all[i];
      const auto outcome = run_episode(cfg, world);
      write_outcome(fs::path(out_dir) / ("seed_" + std::to_string(all[i])), outcome);
      statuses[i] = outcome.status;
      std::lock_guard lock(io);
      std::printf("seed %llu: %s\n", static_cast<unsigned long long>(all[i]), to_string(outcome.status));
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(all.size()));
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  pool.clear();

  std::cout << format_summary_table(summarize_dir(out_dir));
  int code = 0;
  for (auto s : statuses) code = std::max(code, exit_code(s));
  return code;
}

int run_calib_rigid(const std::string& path) {
  const auto pairs = parse_correspondences(read_file(path));
  const auto fit = estimate_rigid(pairs.src, pairs.dst);
  const auto& r = fit.transform.rotation;
  const auto& t = fit.transform.translation;
  std::printf("rotation:\n");
  for (int i = 0; i < 3; ++i) std::printf("  % .12f % .12f % .12f\n", r(i, 0), r(i, 1), r(i, 2));
  std::printf("translation: % .12f % .12f % .12f\n", t(0), t(1), t(2));
  std::printf("rms: %.12g\npairs: %zu\n", fit.rms, pairs.src.size());
  if (fit.degenerate) std::printf("warning: degenerate (collinear) correspondences; rotation is not unique\n");
  return 0;
}

int run_calib_clock(const std::string& path) {
  const auto exchanges = parse_exchanges(read_file(path));
  const auto est = estimate_clock_batch(exchanges);
  std::printf("offset: %.12g\ndelay: %.12g\nexchanges: %zu\n", est.offset, est.delay, exchanges.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical frontier exploration: episodes, sweeps, summaries and calibration"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::string seeds;
  std::string dir;
  std::string file;
  unsigned jobs = 0;

  auto* explore = app.add_subcommand("explore", "Run one episode");
  explore->add_option("--config", config, "Config file")->required();
  explore->add_option("--out", out_dir, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Run one episode per seed");
  sweep->add_option("--config", config, "Config file")->required();
  sweep->add_option("--seeds", seeds, "Seed range a..b (inclusive)")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--jobs", jobs, "Concurrent episodes (0 = one per core)");

  auto* summarize_cmd = app.add_subcommand("summarize", "Table of every metrics.csv under a directory");
  summarize_cmd->add_option("dir", dir, "Directory")->required();

  auto* calib = app.add_subcommand("calib", "Calibration kernels");
  calib->require_subcommand(1);
  auto* rigid = calib->add_subcommand("rigid", "Rigid transform from `sx sy sz dx dy dz` pairs");
  rigid->add_option("pairs", file, "Correspondence file")->required();
  auto* clock = calib->add_subcommand("clock", "Clock offset and delay from `t1 t2 t3 t4` exchanges");
  clock->add_option("exchanges", file, "Exchange file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*explore) return run_explore(config, out_dir);
    if (*sweep) return run_sweep(config, seeds, out_dir, jobs);
    if (*summarize_cmd) {
      std::cout << format_summary_table(summarize_dir(dir));
      return 0;
    }
    if (*rigid) return run_calib_rigid(file);
    if (*clock) return run_calib_clock(file);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitConfigError;
}
