#include <doctest.h>

#include <random>

#include "calib_test_util.hpp"
#include "evcal/errors.hpp"
#include "evcal/homography.hpp"

using namespace evcal;

TEST_CASE("homography from exact correspondences reprojects below 1e-8 px") {
  const BoardSpec board = test::gt_board();
  const CameraModel cam = test::gt_camera(DistortionModel::None);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tilt(-0.4, 0.4);

  for (int trial = 0; trial < 20; ++trial) {
    const Pose pose = test::look_pose(board, tilt(rng), tilt(rng), tilt(rng),
                                      0.02 * tilt(rng), 0.02 * tilt(rng), 0.7);
    const auto det = test::analytic_detection(cam, pose, board);
    if (!det) continue;
    const Eigen::Matrix3d H = estimate_homography(det->corners, det->board_points);
    CHECK(std::abs(H.norm() - 1.0) < 1e-12);
    for (std::size_t k = 0; k < det->corners.size(); ++k) {
      const Eigen::Vector3d q =
          H * Eigen::Vector3d(det->board_points[k].x(), det->board_points[k].y(), 1.0);
      CHECK((q.hnormalized() - det->corners[k]).norm() < 1e-8);
    }
  }
}

TEST_CASE("identity correspondences give the identity up to scale") {
  std::vector<Eigen::Vector2d> corners;
  std::vector<Eigen::Vector3d> board;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) {
      corners.emplace_back(10.0 * j, 10.0 * i);
      board.emplace_back(10.0 * j, 10.0 * i, 0.0);
    }
  const Eigen::Matrix3d H = estimate_homography(corners, board);
  const Eigen::Matrix3d scaled = H / H(2, 2);
  CHECK((scaled - Eigen::Matrix3d::Identity()).norm() < 1e-9);
}

TEST_CASE("collinear points are a degenerate configuration") {
  std::vector<Eigen::Vector2d> corners;
  std::vector<Eigen::Vector3d> board;
  for (int j = 0; j < 4; ++j) {
    corners.emplace_back(10.0 * j, 20.0);
    board.emplace_back(10.0 * j, 0.0, 0.0);
  }
  CHECK_THROWS_AS(estimate_homography(corners, board), DegenerateConfiguration);

  corners.clear();
  CHECK_THROWS_AS(estimate_homography(corners, board), DegenerateConfiguration);
}

TEST_CASE("homography sign maps the board centroid to positive depth") {
  const BoardSpec board = test::gt_board();
  const CameraModel cam = test::gt_camera(DistortionModel::None);
  const Pose pose = test::look_pose(board, 0.3, -0.2, 0.1, 0, 0, 0.6);
  const auto det = test::analytic_detection(cam, pose, board);
  REQUIRE(det);
  const Eigen::Matrix3d H = estimate_homography(det->corners, det->board_points);
  const Eigen::Vector3d c = board.center();
  CHECK(H(2, 0) * c.x() + H(2, 1) * c.y() + H(2, 2) > 0);
}
