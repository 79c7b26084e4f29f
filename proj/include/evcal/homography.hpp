#ifndef EVCAL_HOMOGRAPHY_HPP
#define EVCAL_HOMOGRAPHY_HPP

#include <Eigen/Dense>
#include <vector>

namespace evcal {

// Normalized DLT estimate of the plane-to-image homography: pixel ~ H *
// (X, Y, 1) for board points (X, Y, 0). Frobenius norm 1, sign fixed so the
// board centroid maps to a positive third coordinate. Throws
// DegenerateConfiguration on fewer than 4 or (near-)collinear points.
Eigen::Matrix3d estimate_homography(const std::vector<Eigen::Vector2d>& corners,
                                    const std::vector<Eigen::Vector3d>& board_points);

// Mean algebraic transfer error of an estimated homography, pixels.
double homography_transfer_error(const Eigen::Matrix3d& H,
                                 const std::vector<Eigen::Vector2d>& corners,
                                 const std::vector<Eigen::Vector3d>& board_points);

}  // namespace evcal

#endif
