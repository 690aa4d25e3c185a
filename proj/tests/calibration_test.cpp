#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "hexplore/calibration.hpp"
#include "hexplore/world_sim.hpp"
#include "properties.hpp"

using namespace hexplore;
using namespace hexplore::testing;
using Eigen::Vector3d;

namespace {

std::vector<Vector3d> tetrahedron() { return {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}; }

double rotation_angle(const Eigen::Matrix3d& R) {
  return std::acos(std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0));
}

}  // namespace

TEST_SUITE("calibration") {
  TEST_CASE("identity") {
    const auto pts = tetrahedron();
    const auto fit = estimate_rigid(pts, pts);
    CHECK((fit.transform.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(fit.transform.translation.norm() < 1e-12);
    CHECK(fit.rms < 1e-12);
    CHECK_FALSE(fit.degenerate);
  }

  TEST_CASE("quarter turn about z plus a shift") {
    const Eigen::Matrix3d R = Eigen::AngleAxisd(std::numbers::pi / 2, Vector3d::UnitZ()).toRotationMatrix();
    const Vector3d t(1, 2, 3);
    std::vector<Vector3d> dst;
    for (const auto& p : tetrahedron()) dst.push_back(R * p + t);
    const auto fit = estimate_rigid(tetrahedron(), dst);
    CHECK((fit.transform.rotation - R).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((fit.transform.translation - t).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(fit.rms <= 1e-9);

    // The bundled correspondence file describes the same transform.
    const auto file = parse_correspondences(R"(# comment
0 0 0 1 2 3
1 0 0 1 3 3

0 1 0 0 2 3
0 0 1 1 2 4   # trailing comment
)");
    REQUIRE(file.src.size() == 4);
    const auto f2 = estimate_rigid(file.src, file.dst);
    CHECK((f2.transform.rotation - R).cwiseAbs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("noiseless recovery of random transforms") {
    const auto r = rigid_recovery();
    CHECK(r.instances == 100);
    CHECK(r.failures == 0);
    CHECK(r.worst <= 1e-9);
  }

  TEST_CASE("1 mm noise on 50 points") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-1.0, 1.0), tr(-3.0, 3.0);
    std::normal_distribution<double> noise(0.0, 1e-3);
    std::vector<double> terr, rerr;
    for (int s = 0; s < 100; ++s) {
      const Eigen::Matrix3d R = random_rotation(rng);
      const Vector3d t(tr(rng), tr(rng), tr(rng));
      std::vector<Vector3d> src, dst;
      for (int k = 0; k < 50; ++k) {
        src.emplace_back(u(rng), u(rng), u(rng));
        dst.push_back(R * src.back() + t + Vector3d(noise(rng), noise(rng), noise(rng)));
      }
      const auto fit = estimate_rigid(src, dst);
      terr.push_back((fit.transform.translation - t).norm());
      rerr.push_back(rotation_angle(fit.transform.rotation * R.transpose()) * 180.0 / std::numbers::pi);
    }
    std::nth_element(terr.begin(), terr.begin() + 50, terr.end());
    std::nth_element(rerr.begin(), rerr.begin() + 50, rerr.end());
    CHECK(terr[50] <= 1e-3);
    CHECK(rerr[50] <= 0.1);
  }

  TEST_CASE("left equivariance") {
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
      std::vector<Vector3d> src, dst, moved;
      const Eigen::Matrix3d R = random_rotation(rng), G = random_rotation(rng);
      const Vector3d t(u(rng), u(rng), u(rng)), gt(u(rng), u(rng), u(rng));
      for (int k = 0; k < 8; ++k) {
        src.emplace_back(u(rng), u(rng), u(rng));
        dst.push_back(R * src.back() + t + Vector3d(u(rng), u(rng), u(rng)) * 0.01);
        moved.push_back(G * dst.back() + gt);
      }
      const auto a = estimate_rigid(src, dst).transform;
      const auto b = estimate_rigid(src, moved).transform;
      const auto composed = RigidTransform{G, gt}.compose(a);
      CHECK((b.rotation - composed.rotation).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK((b.translation - composed.translation).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  TEST_CASE("rotation stays proper under reflection-like data") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> n(0.0, 0.3);
    for (int i = 0; i < 200; ++i) {
      std::vector<Vector3d> src, dst;
      for (int k = 0; k < 6; ++k) {
        src.emplace_back(u(rng), u(rng), 0.05 * u(rng));  // nearly planar
        // Mirror through the plane z = 0, then add heavy noise.
        dst.emplace_back(src.back().x() + n(rng), src.back().y() + n(rng), -src.back().z() + n(rng));
      }
      const auto R = estimate_rigid(src, dst).transform.rotation;
      CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(std::abs(R.determinant() - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("collinear points are flagged, too few points rejected") {
    const std::vector<Vector3d> line{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
    CHECK(estimate_rigid(line, line).degenerate);
    const std::vector<Vector3d> two{{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(estimate_rigid(two, two), std::invalid_argument);
    const auto pts = tetrahedron();
    CHECK_THROWS_AS(estimate_rigid(pts, std::span<const Vector3d>(pts).first(3)), std::invalid_argument);
    CHECK_THROWS_AS(parse_correspondences("1 2 3 4 5\n"), ParseError);
    CHECK_THROWS_AS(parse_correspondences("1 2 3 4 5 6 7\n"), ParseError);
  }

  TEST_CASE("clock examples") {
    auto e = estimate_clock({0, 10, 10, 0});
    CHECK(e.offset == 10.0);
    CHECK(e.delay == 0.0);
    // Forward leg 15, return leg 10.
    e = estimate_clock({0, 15, 20, 30});
    CHECK(e.offset == 2.5);
    CHECK(e.delay == 12.5);
    // d_ms = 8, d_sm = 12, true offset 5.
    e = estimate_clock({0, 13, 20, 27});
    CHECK(e.offset == 3.0);
    CHECK(e.delay == 10.0);
    CHECK_THROWS_AS(estimate_clock({0, 1, 2, 0.5}), InvalidExchange);
  }

  TEST_CASE("symmetric exchanges are exact and the asymmetric bias is half the difference") {
    const auto sym = ptp_symmetric();
    CHECK(sym.instances == 1000);
    CHECK(sym.failures == 0);
    const auto asym = ptp_asymmetric_bias();
    CHECK(asym.instances == 1000);
    CHECK(asym.failures == 0);
  }

  TEST_CASE("batch estimates") {
    const std::vector<TimestampExchange> one{{0, 15, 20, 30}};
    CHECK(estimate_clock_batch(one).offset == 2.5);
    CHECK(estimate_clock_batch(one).delay == 12.5);
    CHECK_THROWS_AS(estimate_clock_batch({}), std::invalid_argument);

    std::vector<TimestampExchange> same;
    for (int k = 0; k < 9; ++k) same.push_back({k * 100.0, k * 100.0 + 15, k * 100.0 + 20, k * 100.0 + 30});
    CHECK(estimate_clock_batch(same).offset == 2.5);
    CHECK(estimate_clock_batch(same).delay == 12.5);

    // 20 exchanges, three with a large one-way queueing delay on the forward path.
    std::mt19937_64 rng(74);
    std::uniform_real_distribution<double> jitter(-2e-4, 2e-4);
    std::vector<TimestampExchange> ex;
    const double offset = 0.25, delay = 0.004;
    for (int k = 0; k < 20; ++k) {
      const double t1 = k * 1.0;
      const double fwd = delay + jitter(rng) + (k % 7 == 3 ? 0.5 : 0.0);
      const double back = delay + jitter(rng);
      ex.push_back({t1, t1 + fwd + offset, t1 + fwd + offset + 0.001, t1 + fwd + 0.001 + back});
    }
    const auto med = estimate_clock_batch(ex);
    double mean = 0.0;
    for (const auto& x : ex) mean += estimate_clock(x).offset / 20.0;
    CHECK(std::abs(med.offset - offset) <= 1e-3);
    CHECK(std::abs(mean - offset) > 1e-3);

    // Order does not matter.
    for (int k = 0; k < 20; ++k) {
      std::shuffle(ex.begin(), ex.end(), rng);
      const auto p = estimate_clock_batch(ex);
      CHECK(p.offset == med.offset);
      CHECK(p.delay == med.delay);
    }

    const auto parsed = parse_exchanges("# t1 t2 t3 t4\n0 15 20 30\n\n100 115 120 130\n");
    REQUIRE(parsed.size() == 2);
    CHECK(estimate_clock_batch(parsed).offset == 2.5);
    CHECK_THROWS_AS(parse_exchanges("0 1 2\n"), ParseError);
  }
}
