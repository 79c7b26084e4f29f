#ifndef EVCAL_CALIBRATE_HPP
#define EVCAL_CALIBRATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "evcal/camera_model.hpp"
#include "evcal/detect.hpp"
#include "evcal/pose.hpp"

namespace evcal {

struct SolverOptions {
  int max_iterations = 100;
  double lambda0 = 1e-4;          // Marquardt damping start
  double cost_tol = 1e-10;        // relative cost change on accepted steps
  double grad_tol = 1e-8;         // gradient infinity norm
  bool huber = false;             // robust loss for real data
  double huber_delta = 1.0;       // px
  std::int64_t match_window_us = 25000;  // cross-camera view matching, +-w/2
};

struct CalibrationResult {
  std::vector<CameraModel> cameras;          // one or two
  std::optional<Pose> extrinsic;             // camera0 -> camera1
  std::vector<std::int64_t> view_timestamps;
  std::vector<Pose> view_poses;              // board -> camera0, per view
  double rms_px = 0.0;                       // per-component convention
  std::vector<double> per_view_rms;
  std::vector<double> intrinsic_sigma;       // covariance diagonal sqrt, per camera
  bool converged = true;
  int iterations = 0;
  double final_cost = 0.0;                   // sum of squared residuals
  std::vector<double> cost_history;          // accepted costs, non-increasing

  double baseline_m() const { return extrinsic ? extrinsic->t.norm() : 0.0; }
};

// Closed-form intrinsics from plane homographies (image of the absolute
// conic, zero skew). Needs >= 3 views with distinct orientations; throws
// IllConditioned when the constraint system has no unique solution.
CameraModel init_intrinsics(const std::vector<Eigen::Matrix3d>& homographies,
                            int width, int height);

// Planar pose from the homography decomposition, nearest-rotation
// orthonormalized, board at positive depth.
Pose init_pose(const CameraModel& model, const std::vector<Eigen::Vector2d>& corners,
               const std::vector<Eigen::Vector3d>& board_points);

// Zhang initialization over complete detections: homographies, closed-form
// intrinsics (distortion = 0), per-view poses. central_fraction < 1 uses
// only corners near the image center for the homographies, which keeps
// strong distortion out of the linear step.
CalibrationResult initialize_intrinsics(const std::vector<Detection>& detections,
                                        DistortionModel model, int width, int height,
                                        double central_fraction = 0.6);

// Joint Levenberg-Marquardt refinement of intrinsics, distortion, per-view
// poses and (two-camera case) the inter-camera transform. Camera 0 is the
// gauge. detections[c] lists complete detections of camera c; views are
// associated across cameras by timestamp within match_window_us.
CalibrationResult refine_full(const std::vector<std::vector<Detection>>& detections,
                              const CalibrationResult& init,
                              const SolverOptions& options = {});

// Stereo calibration: chordal-mean rotation / component-median translation
// over per-view relative poses, then joint refinement. Throws NoCovisibility
// without a matched view pair.
CalibrationResult calibrate_stereo(const CalibrationResult& result_a,
                                   const CalibrationResult& result_b,
                                   const std::vector<std::vector<Detection>>& detections,
                                   const SolverOptions& options = {});

// Root-mean-square reprojection error over residual components, recomputed
// from stored poses. Throws MissingPose when a detection has no view pose.
double rms_reprojection(const CalibrationResult& result,
                        const std::vector<std::vector<Detection>>& detections,
                        std::int64_t match_window_us = 25000);

}  // namespace evcal

#endif
