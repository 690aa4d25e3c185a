#pragma once

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace hexplore {

struct RigidTransform {
  Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};
  Eigen::Vector3d translation{Eigen::Vector3d::Zero()};

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
  /// (this * other)(p) = this(other(p))
  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
};

struct RigidFit {
  RigidTransform transform;
  double rms{0.0};          // residual RMS over the pairs, metres
  bool degenerate{false};   // source points (near) collinear: rotation about their line is unconstrained
};

/// Least-squares rigid alignment dst ~ R * src + t for paired points (Kabsch): centroid
/// subtraction, SVD of the cross-covariance, determinant sign correction so det(R) = +1.
/// Throws std::invalid_argument for fewer than 3 pairs or mismatched sizes.
RigidFit estimate_rigid(std::span<const Eigen::Vector3d> src, std::span<const Eigen::Vector3d> dst);

/// One master/slave timestamp exchange. t1 and t4 are read on the master clock, t2 and t3 on the slave.
struct TimestampExchange {
  double t1{0.0};  // master send
  double t2{0.0};  // slave receive
  double t3{0.0};  // slave send
  double t4{0.0};  // master receive
};

struct ClockEstimate {
  double offset{0.0};  // slave - master, s
  double delay{0.0};   // one-way, assuming a symmetric path, s
};

class InvalidExchange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// offset = ((t2 - t1) - (t4 - t3)) / 2, delay = ((t2 - t1) + (t4 - t3)) / 2.
/// A negative delay means the timestamps are inconsistent and throws InvalidExchange.
ClockEstimate estimate_clock(const TimestampExchange& ex);

/// Median of per-exchange offsets and delays. Throws std::invalid_argument on an empty batch.
ClockEstimate estimate_clock_batch(std::span<const TimestampExchange> exchanges);

struct CorrespondenceSet {
  std::vector<Eigen::Vector3d> src;
  std::vector<Eigen::Vector3d> dst;
};

/// `sx sy sz dx dy dz` per line; blank lines and `#` comments skipped.
CorrespondenceSet parse_correspondences(std::string_view text);
/// `t1 t2 t3 t4` per line; blank lines and `#` comments skipped.
std::vector<TimestampExchange> parse_exchanges(std::string_view text);

}  // namespace hexplore
