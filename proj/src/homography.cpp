#include "evcal/homography.hpp"

#include <cmath>

#include "evcal/errors.hpp"

namespace evcal {

namespace {

// Similarity transform taking the points to zero mean and average distance
// sqrt(2) (Hartley normalization).
Eigen::Matrix3d normalizing_transform(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= double(pts.size());
  double dist = 0;
  for (const auto& p : pts) dist += (p - mean).norm();
  dist /= double(pts.size());
  const double s = (dist > 1e-12) ? std::sqrt(2.0) / dist : 1.0;
  Eigen::Matrix3d T = Eigen::Matrix3d::Identity();
  T(0, 0) = T(1, 1) = s;
  T(0, 2) = -s * mean.x();
  T(1, 2) = -s * mean.y();
  return T;
}

bool near_collinear(const std::vector<Eigen::Vector2d>& pts) {
  // Smallest singular value of the centered coordinate matrix vanishes for
  // collinear points.
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= double(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  return eig.eigenvalues()(0) < 1e-10 * std::max(1.0, eig.eigenvalues()(1));
}

}  // namespace

Eigen::Matrix3d estimate_homography(const std::vector<Eigen::Vector2d>& corners,
                                    const std::vector<Eigen::Vector3d>& board_points) {
  const std::size_t n = corners.size();
  if (n < 4 || board_points.size() != n)
    throw DegenerateConfiguration("need at least 4 correspondences");

  std::vector<Eigen::Vector2d> board2d(n);
  for (std::size_t i = 0; i < n; ++i)
    board2d[i] = board_points[i].head<2>();
  if (near_collinear(board2d) || near_collinear(corners))
    throw DegenerateConfiguration();

  const Eigen::Matrix3d Tb = normalizing_transform(board2d);
  const Eigen::Matrix3d Ti = normalizing_transform(corners);

  Eigen::MatrixXd A(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d b = Tb * Eigen::Vector3d(board2d[i].x(), board2d[i].y(), 1.0);
    const Eigen::Vector3d u = Ti * Eigen::Vector3d(corners[i].x(), corners[i].y(), 1.0);
    const Eigen::Index r = static_cast<Eigen::Index>(2 * i);
    A.row(r) << 0, 0, 0, -u.z() * b.transpose(), u.y() * b.transpose();
    A.row(r + 1) << u.z() * b.transpose(), 0, 0, 0, -u.x() * b.transpose();
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

  Eigen::Matrix3d H = Ti.inverse() * Hn * Tb;
  H /= H.norm();

  // Sign: board centroid maps to positive depth.
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& b : board2d) centroid += b;
  centroid /= double(n);
  const double w = H(2, 0) * centroid.x() + H(2, 1) * centroid.y() + H(2, 2);
  if (w < 0) H = -H;
  return H;
}

double homography_transfer_error(const Eigen::Matrix3d& H,
                                 const std::vector<Eigen::Vector2d>& corners,
                                 const std::vector<Eigen::Vector3d>& board_points) {
  double total = 0;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Eigen::Vector3d q =
        H * Eigen::Vector3d(board_points[i].x(), board_points[i].y(), 1.0);
    if (std::abs(q.z()) < 1e-15) return 1e30;
    total += (q.hnormalized() - corners[i]).norm();
  }
  return corners.empty() ? 0.0 : total / double(corners.size());
}

}  // namespace evcal
