#ifndef EVCAL_TESTS_CALIB_TEST_UTIL_HPP
#define EVCAL_TESTS_CALIB_TEST_UTIL_HPP

#include <optional>
#include <random>
#include <vector>

#include "evcal/board.hpp"
#include "evcal/calibrate.hpp"
#include "evcal/camera_model.hpp"
#include "evcal/detect.hpp"
#include "evcal/pose.hpp"

namespace evcal::test {

inline CameraModel gt_camera(DistortionModel model) {
  CameraModel cam;
  cam.model = model;
  cam.fx = cam.fy = 200;
  cam.cx = cam.cy = 250;
  cam.width = cam.height = 500;
  if (model == DistortionModel::RadTan)
    cam.dist << -0.383, 0.189, -0.001, -0.001;
  else if (model == DistortionModel::Equidistant)
    cam.dist << -0.051, 0.046, -0.083, 0.056;
  return cam;
}

inline BoardSpec gt_board() {
  BoardSpec b;
  b.rows = 6;
  b.cols = 9;
  b.square_size = 0.04;
  b.margin = 1;
  return b;
}

// Camera pose looking at the board center from a tilted offset position.
inline Pose look_pose(const BoardSpec& board, double tilt_x, double tilt_y,
                      double roll, double offset_x, double offset_y, double depth) {
  Pose pose;
  pose.q = Eigen::Quaterniond(Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()) *
                              Eigen::AngleAxisd(tilt_x, Eigen::Vector3d::UnitX()) *
                              Eigen::AngleAxisd(tilt_y, Eigen::Vector3d::UnitY()));
  const Eigen::Vector3d target(board.center().x() + offset_x,
                               board.center().y() + offset_y, depth);
  pose.t = target - pose.q * board.center();
  return pose;
}

// Exact projections of every interior corner; empty when any corner leaves
// the image or the frustum.
inline std::optional<Detection> analytic_detection(const CameraModel& cam,
                                                   const Pose& pose,
                                                   const BoardSpec& board,
                                                   std::int64_t timestamp = 0) {
  Detection det;
  det.frame_timestamp = timestamp;
  det.rows = board.rows;
  det.cols = board.cols;
  det.board_points = board_corner_points(board);
  for (const auto& X : det.board_points) {
    const auto px = project(cam, pose, X);
    if (!px || px->x() < 2 || px->y() < 2 || px->x() > cam.width - 3 ||
        px->y() > cam.height - 3)
      return std::nullopt;
    det.corners.push_back(*px);
  }
  det.quality = 1.0;
  return det;
}

// A deterministic spread of well-conditioned views.
inline std::vector<Pose> spread_poses(const BoardSpec& board, int count,
                                      std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tilt(-0.45, 0.45);
  std::uniform_real_distribution<double> roll(-0.5, 0.5);
  std::uniform_real_distribution<double> off(-0.08, 0.08);
  std::uniform_real_distribution<double> depth(0.55, 0.95);
  std::vector<Pose> poses;
  while (static_cast<int>(poses.size()) < count)
    poses.push_back(look_pose(board, tilt(rng), tilt(rng), roll(rng), off(rng),
                              off(rng), depth(rng)));
  return poses;
}

inline std::vector<Detection> analytic_views(const CameraModel& cam,
                                             const BoardSpec& board, int count,
                                             std::uint64_t seed = 7) {
  std::vector<Detection> dets;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tilt(-0.45, 0.45);
  std::uniform_real_distribution<double> roll(-0.5, 0.5);
  std::uniform_real_distribution<double> off(-0.08, 0.08);
  std::uniform_real_distribution<double> depth(0.55, 0.95);
  std::int64_t t = 0;
  while (static_cast<int>(dets.size()) < count) {
    const Pose pose =
        look_pose(board, tilt(rng), tilt(rng), roll(rng), off(rng), off(rng), depth(rng));
    const auto det = analytic_detection(cam, pose, board, t);
    if (det) {
      dets.push_back(*det);
      t += 50000;
    }
  }
  return dets;
}

}  // namespace evcal::test

#endif
