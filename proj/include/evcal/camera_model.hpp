#ifndef EVCAL_CAMERA_MODEL_HPP
#define EVCAL_CAMERA_MODEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "evcal/pose.hpp"

namespace evcal {

enum class DistortionModel { None, RadTan, Equidistant };

inline std::string to_string(DistortionModel m) {
  switch (m) {
    case DistortionModel::None: return "pinhole_none";
    case DistortionModel::RadTan: return "pinhole_radtan";
    case DistortionModel::Equidistant: return "pinhole_equi";
  }
  return "pinhole_none";
}

inline std::optional<DistortionModel> distortion_model_from_string(const std::string& s) {
  if (s == "pinhole_none" || s == "none") return DistortionModel::None;
  if (s == "pinhole_radtan" || s == "radtan") return DistortionModel::RadTan;
  if (s == "pinhole_equi" || s == "equi" || s == "equidistant")
    return DistortionModel::Equidistant;
  return std::nullopt;
}

// Pinhole intrinsics with an optional distortion stage on normalized
// coordinates. dist holds (k1, k2, p1, p2) for RadTan and (k1..k4) for
// Equidistant; it is all zeros for None.
template <typename Scalar>
struct CameraModelT {
  using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
  using Vec4 = Eigen::Matrix<Scalar, 4, 1>;

  DistortionModel model = DistortionModel::None;
  Scalar fx = Scalar(1), fy = Scalar(1);
  Scalar cx = Scalar(0), cy = Scalar(0);
  Vec4 dist = Vec4::Zero();
  int width = 0;
  int height = 0;

  int distortion_param_count() const {
    return model == DistortionModel::None ? 0 : 4;
  }

  Vec2 focal() const { return {fx, fy}; }
  Vec2 principal_point() const { return {cx, cy}; }
};

using CameraModel = CameraModelT<double>;

namespace detail {

constexpr double kMinDepth = 1e-6;

}  // namespace detail

// ---- distortion on normalized coordinates ----

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> distort(DistortionModel model,
                                    const Eigen::Matrix<Scalar, 4, 1>& d,
                                    const Eigen::Matrix<Scalar, 2, 1>& xy) {
  const Scalar x = xy.x(), y = xy.y();
  switch (model) {
    case DistortionModel::None:
      return xy;
    case DistortionModel::RadTan: {
      const Scalar k1 = d[0], k2 = d[1], p1 = d[2], p2 = d[3];
      const Scalar r2 = x * x + y * y;
      const Scalar g = Scalar(1) + k1 * r2 + k2 * r2 * r2;
      return {x * g + Scalar(2) * p1 * x * y + p2 * (r2 + Scalar(2) * x * x),
              y * g + p1 * (r2 + Scalar(2) * y * y) + Scalar(2) * p2 * x * y};
    }
    case DistortionModel::Equidistant: {
      const Scalar r = xy.norm();
      if (r < Scalar(1e-12)) return xy;
      const Scalar theta = std::atan(r);
      const Scalar t2 = theta * theta;
      const Scalar theta_d =
          theta * (Scalar(1) + t2 * (d[0] + t2 * (d[1] + t2 * (d[2] + t2 * d[3]))));
      return xy * (theta_d / r);
    }
  }
  return xy;
}

// d(distorted)/d(normalized), 2x2.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> distort_point_jacobian(
    DistortionModel model, const Eigen::Matrix<Scalar, 4, 1>& d,
    const Eigen::Matrix<Scalar, 2, 1>& xy) {
  using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
  const Scalar x = xy.x(), y = xy.y();
  switch (model) {
    case DistortionModel::None:
      return Mat2::Identity();
    case DistortionModel::RadTan: {
      const Scalar k1 = d[0], k2 = d[1], p1 = d[2], p2 = d[3];
      const Scalar r2 = x * x + y * y;
      const Scalar g = Scalar(1) + k1 * r2 + k2 * r2 * r2;
      const Scalar dg = k1 + Scalar(2) * k2 * r2;  // dg/d(r2)
      Mat2 J;
      J(0, 0) = g + Scalar(2) * x * x * dg + Scalar(2) * p1 * y + Scalar(6) * p2 * x;
      J(0, 1) = Scalar(2) * x * y * dg + Scalar(2) * p1 * x + Scalar(2) * p2 * y;
      J(1, 0) = Scalar(2) * x * y * dg + Scalar(2) * p1 * x + Scalar(2) * p2 * y;
      J(1, 1) = g + Scalar(2) * y * y * dg + Scalar(6) * p1 * y + Scalar(2) * p2 * x;
      return J;
    }
    case DistortionModel::Equidistant: {
      const Scalar r = xy.norm();
      if (r < Scalar(1e-8)) return Mat2::Identity();
      const Scalar theta = std::atan(r);
      const Scalar t2 = theta * theta;
      const Scalar theta_d =
          theta * (Scalar(1) + t2 * (d[0] + t2 * (d[1] + t2 * (d[2] + t2 * d[3]))));
      const Scalar dtheta_d =
          Scalar(1) + t2 * (Scalar(3) * d[0] +
                            t2 * (Scalar(5) * d[1] +
                                  t2 * (Scalar(7) * d[2] + t2 * Scalar(9) * d[3])));
      const Scalar dtheta_dr = Scalar(1) / (Scalar(1) + r * r);
      const Scalar s = theta_d / r;
      // ds/dr
      const Scalar ds = (dtheta_d * dtheta_dr * r - theta_d) / (r * r);
      Mat2 J;
      J(0, 0) = s + x * x * ds / r;
      J(0, 1) = x * y * ds / r;
      J(1, 0) = x * y * ds / r;
      J(1, 1) = s + y * y * ds / r;
      return J;
    }
  }
  return Mat2::Identity();
}

// d(distorted)/d(distortion params), 2x4. Zero for the None model.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 4> distort_param_jacobian(
    DistortionModel model, const Eigen::Matrix<Scalar, 4, 1>& /*d*/,
    const Eigen::Matrix<Scalar, 2, 1>& xy) {
  using Mat24 = Eigen::Matrix<Scalar, 2, 4>;
  const Scalar x = xy.x(), y = xy.y();
  switch (model) {
    case DistortionModel::None:
      return Mat24::Zero();
    case DistortionModel::RadTan: {
      const Scalar r2 = x * x + y * y;
      Mat24 J;
      J(0, 0) = x * r2;
      J(0, 1) = x * r2 * r2;
      J(0, 2) = Scalar(2) * x * y;
      J(0, 3) = r2 + Scalar(2) * x * x;
      J(1, 0) = y * r2;
      J(1, 1) = y * r2 * r2;
      J(1, 2) = r2 + Scalar(2) * y * y;
      J(1, 3) = Scalar(2) * x * y;
      return J;
    }
    case DistortionModel::Equidistant: {
      const Scalar r = xy.norm();
      if (r < Scalar(1e-12)) return Mat24::Zero();
      const Scalar theta = std::atan(r);
      Mat24 J;
      Scalar tp = theta * theta * theta;  // theta^(2i+3), i = 0..3
      for (int i = 0; i < 4; ++i) {
        J(0, i) = x * tp / r;
        J(1, i) = y * tp / r;
        tp *= theta * theta;
      }
      return J;
    }
  }
  return Mat24::Zero();
}

// ---- projection ----

// Pixel coordinates of a camera-frame point, or empty when the point is at
// or behind the optical plane (z <= 1e-6).
template <typename Scalar>
std::optional<Eigen::Matrix<Scalar, 2, 1>> project_camera_point(
    const CameraModelT<Scalar>& cam, const Eigen::Matrix<Scalar, 3, 1>& pc) {
  if (!(pc.z() > Scalar(detail::kMinDepth))) return std::nullopt;
  const Eigen::Matrix<Scalar, 2, 1> n(pc.x() / pc.z(), pc.y() / pc.z());
  const Eigen::Matrix<Scalar, 2, 1> dn = distort(cam.model, cam.dist, n);
  return Eigen::Matrix<Scalar, 2, 1>(cam.fx * dn.x() + cam.cx,
                                     cam.fy * dn.y() + cam.cy);
}

template <typename Scalar>
std::optional<Eigen::Matrix<Scalar, 2, 1>> project(
    const CameraModelT<Scalar>& cam, const PoseT<Scalar>& pose,
    const Eigen::Matrix<Scalar, 3, 1>& point_world) {
  return project_camera_point(cam, pose * point_world);
}

// Jacobians of the projected pixel. d_intrinsics columns are
// (fx, fy, cx, cy); d_dist columns follow the model's parameter order.
template <typename Scalar>
struct ProjectionJacobians {
  Eigen::Matrix<Scalar, 2, 3> d_point;       // wrt camera-frame point
  Eigen::Matrix<Scalar, 2, 4> d_intrinsics;  // wrt fx, fy, cx, cy
  Eigen::Matrix<Scalar, 2, 4> d_dist;        // wrt distortion params
};

template <typename Scalar>
std::optional<Eigen::Matrix<Scalar, 2, 1>> project_camera_point_jacobians(
    const CameraModelT<Scalar>& cam, const Eigen::Matrix<Scalar, 3, 1>& pc,
    ProjectionJacobians<Scalar>& jac) {
  if (!(pc.z() > Scalar(detail::kMinDepth))) return std::nullopt;
  const Scalar iz = Scalar(1) / pc.z();
  const Eigen::Matrix<Scalar, 2, 1> n(pc.x() * iz, pc.y() * iz);
  const Eigen::Matrix<Scalar, 2, 1> dn = distort(cam.model, cam.dist, n);

  Eigen::Matrix<Scalar, 2, 3> dnorm;
  dnorm << iz, Scalar(0), -pc.x() * iz * iz, Scalar(0), iz, -pc.y() * iz * iz;

  const Eigen::Matrix<Scalar, 2, 2> ddist =
      distort_point_jacobian(cam.model, cam.dist, n);
  Eigen::Matrix<Scalar, 2, 2> K;
  K << cam.fx, Scalar(0), Scalar(0), cam.fy;

  jac.d_point = K * ddist * dnorm;

  jac.d_intrinsics.setZero();
  jac.d_intrinsics(0, 0) = dn.x();
  jac.d_intrinsics(1, 1) = dn.y();
  jac.d_intrinsics(0, 2) = Scalar(1);
  jac.d_intrinsics(1, 3) = Scalar(1);

  jac.d_dist = K * distort_param_jacobian(cam.model, cam.dist, n);

  return Eigen::Matrix<Scalar, 2, 1>(cam.fx * dn.x() + cam.cx,
                                     cam.fy * dn.y() + cam.cy);
}

// ---- unprojection ----

namespace detail {

// Radius where the radial-tangential polynomial r * (1 + k1 r^2 + k2 r^4)
// stops increasing; beyond it the model folds over and is not invertible.
// Infinity when monotone everywhere.
template <typename Scalar>
Scalar radtan_fold_radius(Scalar k1, Scalar k2) {
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  // d/dr = 1 + 3 k1 r^2 + 5 k2 r^4, roots in u = r^2.
  if (std::abs(k2) < Scalar(1e-15)) {
    if (k1 >= Scalar(0)) return inf;
    return std::sqrt(Scalar(-1) / (Scalar(3) * k1));
  }
  const Scalar disc = Scalar(9) * k1 * k1 - Scalar(20) * k2;
  if (disc < Scalar(0)) return inf;
  const Scalar sq = std::sqrt(disc);
  Scalar best = inf;
  for (const Scalar u : {(-Scalar(3) * k1 - sq) / (Scalar(10) * k2),
                         (-Scalar(3) * k1 + sq) / (Scalar(10) * k2)}) {
    if (u > Scalar(0)) best = std::min(best, std::sqrt(u));
  }
  return best;
}

// First stationary point of theta_d(theta) on (0, pi/2], by scan+bisection.
template <typename Scalar>
Scalar equi_fold_theta(const Eigen::Matrix<Scalar, 4, 1>& k) {
  auto slope = [&](Scalar theta) {
    const Scalar t2 = theta * theta;
    return Scalar(1) + t2 * (Scalar(3) * k[0] +
                             t2 * (Scalar(5) * k[1] +
                                   t2 * (Scalar(7) * k[2] + t2 * Scalar(9) * k[3])));
  };
  const Scalar hi = Scalar(M_PI / 2);
  Scalar prev = Scalar(0);
  for (int i = 1; i <= 128; ++i) {
    const Scalar theta = hi * Scalar(i) / Scalar(128);
    if (slope(theta) <= Scalar(0)) {
      Scalar a = prev, b = theta;
      for (int it = 0; it < 50; ++it) {
        const Scalar mid = (a + b) / Scalar(2);
        (slope(mid) > Scalar(0) ? a : b) = mid;
      }
      return (a + b) / Scalar(2);
    }
    prev = theta;
  }
  return std::numeric_limits<Scalar>::infinity();
}

}  // namespace detail

// Inverts the distortion by Newton iteration on normalized coordinates.
// Returns the unit-norm ray, or empty when the pixel lies beyond the range
// where the distortion is invertible.
template <typename Scalar>
std::optional<Eigen::Matrix<Scalar, 3, 1>> unproject(
    const CameraModelT<Scalar>& cam, const Eigen::Matrix<Scalar, 2, 1>& pixel) {
  using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
  const Vec2 target((pixel.x() - cam.cx) / cam.fx, (pixel.y() - cam.cy) / cam.fy);

  Vec2 n = target;
  if (cam.model == DistortionModel::Equidistant) {
    // theta_d = |target|; recover theta, then r = tan(theta).
    const Scalar theta_d = target.norm();
    if (theta_d > Scalar(1e-12)) {
      Scalar theta = theta_d;
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        const Scalar t2 = theta * theta;
        const Scalar f = theta * (Scalar(1) +
                                  t2 * (cam.dist[0] +
                                        t2 * (cam.dist[1] +
                                              t2 * (cam.dist[2] + t2 * cam.dist[3])))) -
                         theta_d;
        const Scalar df =
            Scalar(1) + t2 * (Scalar(3) * cam.dist[0] +
                              t2 * (Scalar(5) * cam.dist[1] +
                                    t2 * (Scalar(7) * cam.dist[2] +
                                          t2 * Scalar(9) * cam.dist[3])));
        if (std::abs(df) < Scalar(1e-14)) return std::nullopt;
        const Scalar step = f / df;
        theta -= step;
        if (std::abs(step) < Scalar(1e-14)) {
          converged = true;
          break;
        }
      }
      if (!converged || !(theta > Scalar(0)) || !(theta < Scalar(M_PI / 2)))
        return std::nullopt;
      if (theta > detail::equi_fold_theta(cam.dist)) return std::nullopt;
      n = target * (std::tan(theta) / theta_d);
    }
  } else if (cam.model == DistortionModel::RadTan) {
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const Vec2 f = distort(cam.model, cam.dist, n) - target;
      const Eigen::Matrix<Scalar, 2, 2> J =
          distort_point_jacobian(cam.model, cam.dist, n);
      const Scalar det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
      if (std::abs(det) < Scalar(1e-14)) return std::nullopt;
      Vec2 step;
      step.x() = (J(1, 1) * f.x() - J(0, 1) * f.y()) / det;
      step.y() = (-J(1, 0) * f.x() + J(0, 0) * f.y()) / det;
      n -= step;
      if (!n.allFinite()) return std::nullopt;
      if (step.template lpNorm<Eigen::Infinity>() < Scalar(1e-12)) {
        converged = true;
        break;
      }
    }
    if (!converged) return std::nullopt;
    if (n.norm() > detail::radtan_fold_radius(cam.dist[0], cam.dist[1]))
      return std::nullopt;
  }

  // Reject solutions the forward model does not reproduce.
  if ((distort(cam.model, cam.dist, n) - target).template lpNorm<Eigen::Infinity>() >
      Scalar(1e-10))
    return std::nullopt;

  Eigen::Matrix<Scalar, 3, 1> ray(n.x(), n.y(), Scalar(1));
  ray.normalize();
  return ray;
}

}  // namespace evcal

#endif
