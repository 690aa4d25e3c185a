#include "hexplore/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "hexplore/world_sim.hpp"

namespace hexplore {

RigidFit estimate_rigid(std::span<const Eigen::Vector3d> src, std::span<const Eigen::Vector3d> dst) {
  if (src.size() != dst.size()) throw std::invalid_argument("estimate_rigid: point sets differ in size");
  if (src.size() < 3) throw std::invalid_argument("estimate_rigid: need at least 3 point pairs");

  const double n = static_cast<double>(src.size());
  Eigen::Vector3d cs = Eigen::Vector3d::Zero();
  Eigen::Vector3d cd = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= n;
  cd /= n;

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d spread = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d a = src[i] - cs;
    h += a * (dst[i] - cd).transpose();
    spread += a * a.transpose();
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;

  RigidFit fit;
  fit.transform.rotation = v * d * u.transpose();
  fit.transform.translation = cd - fit.transform.rotation * cs;

  double sse = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) sse += (fit.transform.apply(src[i]) - dst[i]).squaredNorm();
  fit.rms = std::sqrt(sse / n);

  // Collinear sources leave only one non-zero principal spread.
  const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(spread).eigenvalues();
  fit.degenerate = !(ev(1) > 1e-12 * std::max(1.0, ev(2)));
  return fit;
}

ClockEstimate estimate_clock(const TimestampExchange& ex) {
  const double forward = ex.t2 - ex.t1;
  const double reverse = ex.t4 - ex.t3;
  ClockEstimate e{(forward - reverse) / 2.0, (forward + reverse) / 2.0};
  if (e.delay < 0.0) throw InvalidExchange("estimate_clock: negative path delay, timestamps are inconsistent");
  return e;
}

namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

template <class F>
void for_each_data_line(std::string_view text, F&& fn) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(line_no, line);
  }
}

}  // namespace

ClockEstimate estimate_clock_batch(std::span<const TimestampExchange> exchanges) {
  if (exchanges.empty()) throw std::invalid_argument("estimate_clock_batch: no exchanges");
  std::vector<double> offsets;
  std::vector<double> delays;
  offsets.reserve(exchanges.size());
  delays.reserve(exchanges.size());
  for (const auto& ex : exchanges) {
    const auto e = estimate_clock(ex);
    offsets.push_back(e.offset);
    delays.push_back(e.delay);
  }
  return {median(std::move(offsets)), median(std::move(delays))};
}

CorrespondenceSet parse_correspondences(std::string_view text) {
  CorrespondenceSet out;
  for_each_data_line(text, [&](int line_no, const std::string& line) {
    std::istringstream ls(line);
    double v[6];
    for (double& x : v) {
      if (!(ls >> x)) throw ParseError(line_no, "expected `sx sy sz dx dy dz`");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(line_no, "trailing content after six numbers");
    out.src.emplace_back(v[0], v[1], v[2]);
    out.dst.emplace_back(v[3], v[4], v[5]);
  });
  return out;
}

std::vector<TimestampExchange> parse_exchanges(std::string_view text) {
  std::vector<TimestampExchange> out;
  for_each_data_line(text, [&](int line_no, const std::string& line) {
    std::istringstream ls(line);
    TimestampExchange ex;
    if (!(ls >> ex.t1 >> ex.t2 >> ex.t3 >> ex.t4)) throw ParseError(line_no, "expected `t1 t2 t3 t4`");
    std::string extra;
    if (ls >> extra) throw ParseError(line_no, "trailing content after four numbers");
    out.push_back(ex);
  });
  return out;
}

}  // namespace hexplore
