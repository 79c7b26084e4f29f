#ifndef EVCAL_TRAJECTORY_HPP
#define EVCAL_TRAJECTORY_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "evcal/errors.hpp"
#include "evcal/pose.hpp"

namespace evcal {

// Piecewise-interpolated camera motion: linear in translation, spherical-
// linear in rotation. Control timestamps are strictly increasing.
struct Trajectory {
  struct ControlPoint {
    std::int64_t t_us = 0;
    Pose pose;
  };
  std::vector<ControlPoint> points;

  bool valid() const {
    if (points.empty()) return false;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i].t_us <= points[i - 1].t_us) return false;
    return true;
  }

  std::int64_t t_begin() const { return points.front().t_us; }
  std::int64_t t_end() const { return points.back().t_us; }
};

// Exact at control points. Throws OutOfRange outside [t_begin, t_end].
inline Pose sample_pose(const Trajectory& traj, std::int64_t t_us) {
  if (traj.points.empty() || t_us < traj.t_begin() || t_us > traj.t_end())
    throw OutOfRange("trajectory sampled at t=" + std::to_string(t_us) + "us");
  const auto it = std::upper_bound(
      traj.points.begin(), traj.points.end(), t_us,
      [](std::int64_t t, const Trajectory::ControlPoint& c) { return t < c.t_us; });
  const std::size_t hi = static_cast<std::size_t>(it - traj.points.begin());
  if (hi == traj.points.size()) return traj.points.back().pose;
  const auto& a = traj.points[hi - 1];
  const auto& b = traj.points[hi];
  const double u = double(t_us - a.t_us) / double(b.t_us - a.t_us);
  Pose out;
  out.q = a.pose.q.slerp(u, b.pose.q);
  // a + u*(b-a) rather than (1-u)*a + u*b: bit-stable on constant segments.
  out.t = a.pose.t + u * (b.pose.t - a.pose.t);
  return out;
}

}  // namespace evcal

#endif
