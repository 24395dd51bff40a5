#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "core/rng.hpp"
#include "geom/refine.hpp"
#include "geom/triangulate.hpp"
#include "geom/zone_map.hpp"
#include "oracles.hpp"

using namespace tubeloc;
using oracles::test_intrinsics;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("exp map basics") {
  const geom::Pose id = geom::exp_map(geom::Twist::Zero());
  CHECK(id.position.norm() == 0.0);
  CHECK((id.rotation.matrix() - geom::Mat3::Identity()).norm() == 0.0);

  geom::Twist t = geom::Twist::Zero();
  t[2] = kPi / 2;  // quarter turn about z
  const geom::Pose p = geom::exp_map(t);
  CHECK((p.rotation * geom::Vec3::UnitX() - geom::Vec3::UnitY()).norm() < 1e-12);
  CHECK(p.position.norm() < 1e-12);
}

TEST_CASE("exp/log roundtrip over 1000 seeded twists") {
  auto rng = make_rng(11);
  std::uniform_real_distribution<double> rot(0.0, kPi - 0.1);
  std::uniform_real_distribution<double> trans(0.0, 200.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const geom::Twist t = oracles::random_twist(rng, rot(rng), trans(rng));
    const geom::Twist back = geom::log_map(geom::exp_map(t));
    worst = std::max(worst, (back - t).norm());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("rotation invariants survive 10^4 compositions") {
  auto rng = make_rng(12);
  geom::Rotation r = geom::Rotation::identity();
  for (int i = 0; i < 10000; ++i) {
    const geom::Twist t = oracles::random_twist(rng, 0.5, 0.0);
    r = r * geom::Rotation::exp(t.head<3>());
    if (i % 1000 == 0) r = r.inverse();
  }
  CHECK(r.orthonormality_error() < 1e-9);
}

TEST_CASE("log near pi signals the caller") {
  const geom::Rotation r = geom::Rotation::exp(geom::Vec3(0, 0, kPi - 1e-9));
  CHECK_THROWS_AS(r.log(), std::domain_error);
  // Just inside the guard band still works.
  const geom::Vec3 ok = geom::Rotation::exp(geom::Vec3(0, 0, kPi - 1e-3)).log();
  CHECK(std::abs(ok.z() - (kPi - 1e-3)) < 1e-9);
}

TEST_CASE("pose composition and inverse") {
  auto rng = make_rng(13);
  for (int i = 0; i < 100; ++i) {
    const geom::Pose a = oracles::random_pose(rng);
    const geom::Pose b = oracles::random_pose(rng);
    const geom::Pose c = oracles::random_pose(rng);
    const geom::Pose left = (a * b) * c;
    const geom::Pose right = a * (b * c);
    CHECK((left.position - right.position).norm() < 1e-9);
    CHECK((left.rotation.matrix() - right.rotation.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    const geom::Pose e = a * a.inverse();
    CHECK(e.position.norm() < 1e-9);
    CHECK((e.rotation.matrix() - geom::Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("project principal point and behind-camera") {
  const auto k = test_intrinsics();
  const auto px = geom::project(geom::Pose::identity(), k, geom::Vec3(0, 0, 42.0));
  REQUIRE(px.has_value());
  CHECK(px->x() == doctest::Approx(k.cx).epsilon(1e-12));
  CHECK(px->y() == doctest::Approx(k.cy).epsilon(1e-12));

  CHECK_FALSE(geom::project(geom::Pose::identity(), k, geom::Vec3(0, 0, -5.0)).has_value());
  CHECK_FALSE(geom::project(geom::Pose::identity(), k, geom::Vec3(0, 0, 0.0)).has_value());
}

TEST_CASE("reprojection jacobians match central finite differences") {
  const auto k = test_intrinsics();
  auto rng = make_rng(14);
  const double h = 1e-6;
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const geom::Pose pose = oracles::random_pose(rng, 0.4, 30.0);
    geom::Vec3 point;
    do {
      point = oracles::random_points_in_view(rng, 1)[0];
    } while (pose.to_camera(point).z() < 10.0);
    const auto jac = geom::reprojection_jacobians(pose, k, point);
    REQUIRE(jac.has_value());

    Eigen::Matrix<double, 2, 6> fd_pose;
    for (int i = 0; i < 6; ++i) {
      geom::Twist d = geom::Twist::Zero();
      d[i] = h;
      const auto plus = geom::project(geom::exp_map(d) * pose, k, point);
      const auto minus = geom::project(geom::exp_map(-d) * pose, k, point);
      REQUIRE(plus.has_value());
      REQUIRE(minus.has_value());
      fd_pose.col(i) = (*plus - *minus) / (2 * h);
    }
    Eigen::Matrix<double, 2, 3> fd_point;
    for (int i = 0; i < 3; ++i) {
      geom::Vec3 d = geom::Vec3::Zero();
      d[i] = h;
      const auto plus = geom::project(pose, k, point + d);
      const auto minus = geom::project(pose, k, point - d);
      fd_point.col(i) = (*plus - *minus) / (2 * h);
    }
    worst = std::max(worst, (jac->pose - fd_pose).cwiseAbs().maxCoeff() /
                                std::max(1.0, fd_pose.cwiseAbs().maxCoeff()));
    worst = std::max(worst, (jac->point - fd_point).cwiseAbs().maxCoeff() /
                                std::max(1.0, fd_point.cwiseAbs().maxCoeff()));
  }
  CHECK(worst < 1e-4);
}

namespace {

std::vector<std::pair<geom::Observation2D, geom::Pose>> observe_point(
    const std::vector<geom::Pose>& cams, const geom::Vec3& point,
    const geom::CameraIntrinsics& k, std::mt19937_64* rng = nullptr, double noise_px = 0.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::pair<geom::Observation2D, geom::Pose>> obs;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    const auto px = geom::project(cams[i], k, point);
    REQUIRE(px.has_value());
    geom::Observation2D o;
    o.pixel = *px;
    if (rng && noise_px > 0)
      o.pixel += noise_px * geom::Vec2(gauss(*rng), gauss(*rng));
    o.image_index = static_cast<int>(i);
    obs.emplace_back(o, cams[i]);
  }
  return obs;
}

}  // namespace

TEST_CASE("triangulation: exact recovery, zero baseline, degenerate input") {
  const auto k = test_intrinsics();
  auto rng = make_rng(15);
  const auto cams = oracles::camera_ring(rng, 3, 25.0);
  const geom::Vec3 truth(12.0, -8.0, 105.0);
  const auto obs = observe_point(cams, truth, k);
  const auto rec = geom::triangulate_point(obs, k);
  REQUIRE(rec.has_value());
  CHECK((*rec - truth).norm() < 1e-6);

  // Identical poses: zero baseline.
  auto same = obs;
  for (auto& [o, pose] : same) pose = cams[0];
  CHECK_FALSE(geom::triangulate_point(same, k).has_value());

  CHECK_THROWS_AS(geom::triangulate_point({}, k), std::invalid_argument);
}

TEST_CASE("triangulation agrees with the brute-force grid oracle") {
  const auto k = test_intrinsics();
  auto rng = make_rng(16);
  // Well-conditioned instances (5 views, ~60 degrees of parallax) keep the
  // objective valley steep enough for a lattice argmin to be meaningful.
  const double half_width = 3.0;
  const int samples = 31;
  const double cell = 2.0 * half_width / (samples - 1);
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto cams = oracles::camera_ring(rng, 5, 55.0, 25.0);
    const geom::Vec3 truth = oracles::random_points_in_view(rng, 1, 18.0)[0];
    auto obs = observe_point(cams, truth, k, &rng, 0.5);
    const auto rec = geom::triangulate_point(obs, k);
    if (!rec) continue;  // extreme noise draw; the oracle comparison needs a solution
    const geom::Vec3 grid = oracles::grid_search_point(obs, k, truth, half_width, samples);
    // Grid minimizer must not sit on the box boundary (the argmin would clamp).
    if ((grid - truth).cwiseAbs().maxCoeff() > half_width - cell) continue;
    CHECK((*rec - grid).cwiseAbs().maxCoeff() <= cell + 1e-9);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("noisy triangulation error is bounded by the grid oracle") {
  // The 3-view, ~30-degree-parallax setting: the recovered point must not be
  // farther from truth than the brute-force minimizer, up to grid resolution.
  const auto k = test_intrinsics();
  auto rng = make_rng(19);
  const double half_width = 6.0;
  const int samples = 41;
  const double cell = 2.0 * half_width / (samples - 1);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto cams = oracles::camera_ring(rng, 3, 27.0);
    const geom::Vec3 truth = oracles::random_points_in_view(rng, 1)[0];
    auto obs = observe_point(cams, truth, k, &rng, 0.5);
    const auto rec = geom::triangulate_point(obs, k);
    if (!rec) continue;
    const geom::Vec3 grid = oracles::grid_search_point(obs, k, truth, half_width, samples);
    if ((grid - truth).cwiseAbs().maxCoeff() > half_width - cell) continue;
    const double oracle_bound = (grid - truth).norm() + cell * std::sqrt(3.0);
    CHECK((*rec - truth).norm() <= oracle_bound);
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("refine_pose: fixed point, exact recovery, error paths") {
  const auto k = test_intrinsics();
  auto rng = make_rng(17);
  const geom::Pose truth = oracles::random_pose(rng, 0.2, 20.0);
  const auto points = oracles::random_points_in_view(rng, 12);
  std::vector<geom::PointObservation> matches;
  for (const auto& wp : points) {
    const geom::Vec3 world = truth * wp;  // keep points in front of the camera
    const auto px = geom::project(truth, k, world);
    REQUIRE(px.has_value());
    matches.push_back({world, *px});
  }

  SUBCASE("initial at truth stays put with zero rms") {
    const auto res = geom::refine_pose(truth, matches, k);
    CHECK(res.converged());
    CHECK(res.final_rms < 1e-12);
    CHECK((res.pose.position - truth.position).norm() < 1e-12);
  }

  SUBCASE("recovers truth from a (5 deg, 10 mm) perturbation") {
    const geom::Twist d = oracles::random_twist(rng, 5.0 * kPi / 180.0, 10.0);
    const auto res = geom::refine_pose(geom::exp_map(d) * truth, matches, k);
    CHECK(res.converged());
    CHECK((res.pose.position - truth.position).norm() < 1e-6);
    CHECK(res.pose.rotation.angle_to(truth.rotation) * 180.0 / kPi < 1e-6);
    // Accepted objective values never increase.
    for (std::size_t i = 1; i < res.objective_history.size(); ++i)
      CHECK(res.objective_history[i] <= res.objective_history[i - 1]);
  }

  SUBCASE("fewer than 4 matches is a caller error") {
    std::vector<geom::PointObservation> three(matches.begin(), matches.begin() + 3);
    CHECK_THROWS_AS(geom::refine_pose(truth, three, k), std::invalid_argument);
  }

  SUBCASE("degenerate geometry reports singular and keeps the initial pose") {
    std::vector<geom::PointObservation> same(4, matches[0]);
    const auto res = geom::refine_pose(truth, same, k);
    CHECK(res.status == geom::RefineStatus::Singular);
    CHECK((res.pose.position - truth.position).norm() == 0.0);
  }
}

TEST_CASE("zone map file round-trips byte-exactly") {
  auto rng = make_rng(18);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::vector<geom::MapPoint> points(7);
  for (auto& p : points) {
    p.position = geom::Vec3(u(rng), u(rng), u(rng));
    p.zone_id = 3;
    p.max_reproj_error = std::abs(u(rng)) * 0.05;
    for (int i = 0; i < features::kDescriptorLength; ++i) p.descriptor[i] = u(rng) / 100.0;
    p.descriptor.normalize();
  }
  const std::string path1 = "zone_roundtrip_a.map";
  const std::string path2 = "zone_roundtrip_b.map";
  geom::write_zone_map(path1, 3, 10.0, points);
  const auto loaded = geom::read_zone_map(path1);
  CHECK(loaded.zone_id == 3);
  CHECK(loaded.delta_r == 10.0);
  REQUIRE(loaded.points.size() == points.size());
  geom::write_zone_map(path2, loaded.zone_id, loaded.delta_r, loaded.points);

  std::ifstream f1(path1, std::ios::binary), f2(path2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(!b1.empty());
}
