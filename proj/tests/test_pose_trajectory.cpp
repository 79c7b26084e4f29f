#include <doctest.h>

#include <cmath>

#include "evcal/pose.hpp"
#include "evcal/trajectory.hpp"

using namespace evcal;

TEST_CASE("pose composition and inverse") {
  Pose a;
  a.q = Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitY()));
  a.t = Eigen::Vector3d(1, 2, 3);
  Pose b;
  b.q = Eigen::Quaterniond(Eigen::AngleAxisd(-0.7, Eigen::Vector3d(1, 1, 0).normalized()));
  b.t = Eigen::Vector3d(0, -1, 2);

  const Eigen::Vector3d x(0.4, -0.2, 1.5);
  CHECK(((a * b) * x - a * (b * x)).norm() < 1e-12);

  const Pose id = a * a.inverse();
  CHECK(id.t.norm() < 1e-12);
  CHECK(rotation_distance(id.q, Eigen::Quaterniond::Identity()) < 1e-12);
}

TEST_CASE("trajectory sampling is exact at control points") {
  Trajectory traj;
  Pose p0;
  p0.t = Eigen::Vector3d(0, 0, 1);
  Pose p1;
  p1.q = Eigen::Quaterniond(Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()));
  p1.t = Eigen::Vector3d(0, 0, 3);
  traj.points = {{1000, p0}, {5000, p1}};
  REQUIRE(traj.valid());

  const Pose s0 = sample_pose(traj, 1000);
  CHECK((s0.t - p0.t).norm() < 1e-15);
  CHECK(rotation_distance(s0.q, p0.q) < 1e-15);
  const Pose s1 = sample_pose(traj, 5000);
  CHECK((s1.t - p1.t).norm() < 1e-15);
  CHECK(rotation_distance(s1.q, p1.q) < 1e-15);
}

TEST_CASE("trajectory midpoint: linear translation, slerp rotation") {
  Trajectory traj;
  Pose p0;
  p0.t = Eigen::Vector3d(0, 0, 1);
  Pose p1;
  p1.q = Eigen::Quaterniond(Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()));
  p1.t = Eigen::Vector3d(0, 0, 3);
  traj.points = {{0, p0}, {2000, p1}};

  const Pose mid = sample_pose(traj, 1000);
  CHECK((mid.t - Eigen::Vector3d(0, 0, 2)).norm() < 1e-12);

  // Closed-form slerp midpoint between identity and a 90 degree turn about z
  // is a 45 degree turn about z.
  const Eigen::Quaterniond expected(Eigen::AngleAxisd(M_PI / 4, Eigen::Vector3d::UnitZ()));
  CHECK(rotation_distance(mid.q, expected) < 1e-12);
}

TEST_CASE("trajectory sampling outside support throws") {
  Trajectory traj;
  traj.points = {{1000, Pose::Identity()}, {2000, Pose::Identity()}};
  CHECK_THROWS_AS(sample_pose(traj, 999), OutOfRange);
  CHECK_THROWS_AS(sample_pose(traj, 2001), OutOfRange);
}

TEST_CASE("quaternion exponential of small and finite rotations") {
  const Eigen::Vector3d w(0.0, 0.0, M_PI / 2);
  const Eigen::Quaterniond q = quat_exp(w);
  const Eigen::Quaterniond expected(Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()));
  CHECK(rotation_distance(q, expected) < 1e-12);

  const Eigen::Vector3d tiny(1e-14, -2e-14, 3e-14);
  const Eigen::Quaterniond qt = quat_exp(tiny);
  CHECK(std::abs(qt.norm() - 1.0) < 1e-15);
}

TEST_CASE("pose increments compose on the left") {
  Pose p;
  p.q = Eigen::Quaterniond(Eigen::AngleAxisd(0.4, Eigen::Vector3d::UnitX()));
  p.t = Eigen::Vector3d(1, 0, 0);
  const Eigen::Vector3d dtheta(0, 0.1, 0);
  const Eigen::Vector3d dt(0, 0, 0.5);
  const Pose q = apply_increment(p, dtheta, dt);
  const Eigen::Quaterniond expected = quat_exp(dtheta) * p.q;
  CHECK(rotation_distance(q.q, expected) < 1e-12);
  CHECK((q.t - Eigen::Vector3d(1, 0, 0.5)).norm() < 1e-15);
  CHECK(std::abs(q.q.norm() - 1.0) < 1e-12);
}
