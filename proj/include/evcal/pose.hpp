#ifndef EVCAL_POSE_HPP
#define EVCAL_POSE_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace evcal {

// Rigid transform mapping target/world coordinates to camera coordinates:
// X_cam = q * X_world + t.
template <typename Scalar>
struct PoseT {
  Eigen::Quaternion<Scalar> q = Eigen::Quaternion<Scalar>::Identity();
  Eigen::Matrix<Scalar, 3, 1> t = Eigen::Matrix<Scalar, 3, 1>::Zero();

  static PoseT Identity() { return {}; }

  Eigen::Matrix<Scalar, 3, 1> operator*(const Eigen::Matrix<Scalar, 3, 1>& x) const {
    return q * x + t;
  }

  // this ∘ other: first apply other, then this.
  PoseT operator*(const PoseT& other) const {
    PoseT out;
    out.q = q * other.q;
    out.q.normalize();
    out.t = q * other.t + t;
    return out;
  }

  PoseT inverse() const {
    PoseT out;
    out.q = q.conjugate();
    out.t = -(out.q * t);
    return out;
  }

  Eigen::Matrix<Scalar, 3, 3> rotation() const { return q.toRotationMatrix(); }
};

using Pose = PoseT<double>;

// Rotation-vector exponential as a quaternion.
template <typename Scalar>
Eigen::Quaternion<Scalar> quat_exp(const Eigen::Matrix<Scalar, 3, 1>& w) {
  const Scalar angle = w.norm();
  if (angle < Scalar(1e-12)) {
    Eigen::Quaternion<Scalar> q(Scalar(1), w.x() / Scalar(2), w.y() / Scalar(2),
                                w.z() / Scalar(2));
    q.normalize();
    return q;
  }
  const Eigen::Matrix<Scalar, 3, 1> axis = w / angle;
  return Eigen::Quaternion<Scalar>(Eigen::AngleAxis<Scalar>(angle, axis));
}

// Left-composes a local rotation increment and adds a translation increment,
// the update used by the calibration solver.
template <typename Scalar>
PoseT<Scalar> apply_increment(const PoseT<Scalar>& pose,
                              const Eigen::Matrix<Scalar, 3, 1>& dtheta,
                              const Eigen::Matrix<Scalar, 3, 1>& dt) {
  PoseT<Scalar> out;
  out.q = quat_exp(dtheta) * pose.q;
  out.q.normalize();
  out.t = pose.t + dt;
  return out;
}

// Geodesic angle between two rotations, radians.
template <typename Scalar>
Scalar rotation_distance(const Eigen::Quaternion<Scalar>& a,
                         const Eigen::Quaternion<Scalar>& b) {
  Scalar d = std::abs(a.dot(b));
  d = std::min(d, Scalar(1));
  return Scalar(2) * std::acos(d);
}

}  // namespace evcal

#endif
