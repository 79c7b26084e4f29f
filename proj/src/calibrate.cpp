#include "evcal/calibrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "evcal/errors.hpp"
#include "evcal/homography.hpp"

namespace evcal {

namespace {

// Constraint row on b = (B11, B22, B13, B23, B33) from homography columns
// i and j (zero-skew image of the absolute conic).
Eigen::Matrix<double, 5, 1> iac_row(const Eigen::Matrix3d& H, int i, int j) {
  Eigen::Matrix<double, 5, 1> v;
  v << H(0, i) * H(0, j), H(1, i) * H(1, j), H(2, i) * H(0, j) + H(0, i) * H(2, j),
      H(2, i) * H(1, j) + H(1, i) * H(2, j), H(2, i) * H(2, j);
  return v;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& M) {
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0) {
    Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
    fix(2, 2) = -1;
    R = svd.matrixU() * fix * svd.matrixV().transpose();
  }
  return R;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

}  // namespace

CameraModel init_intrinsics(const std::vector<Eigen::Matrix3d>& homographies,
                            int width, int height) {
  if (homographies.size() < 3)
    throw DegenerateConfiguration("need at least 3 homographies");

  Eigen::MatrixXd V(2 * homographies.size(), 5);
  for (std::size_t k = 0; k < homographies.size(); ++k) {
    const Eigen::Matrix3d& H = homographies[k];
    V.row(static_cast<Eigen::Index>(2 * k)) = iac_row(H, 0, 1).transpose();
    V.row(static_cast<Eigen::Index>(2 * k + 1)) =
        (iac_row(H, 0, 0) - iac_row(H, 1, 1)).transpose();
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  // The solution is the null vector; a second vanishing singular value means
  // the views do not pin the conic down.
  const double cond = s(0) / std::max(s(3), 1e-300);
  if (!(cond < 1e8)) throw IllConditioned(cond);

  Eigen::VectorXd b = svd.matrixV().col(4);
  if (b(0) < 0) b = -b;
  const double B11 = b(0), B22 = b(1), B13 = b(2), B23 = b(3), B33 = b(4);
  if (B22 <= 0) throw IllConditioned(cond);

  const double v0 = -B23 / B22;
  const double lambda = B33 - B13 * B13 / B11 + v0 * B23;
  if (lambda <= 0 || lambda / B11 <= 0 || lambda / B22 <= 0)
    throw IllConditioned(cond);

  CameraModel cam;
  cam.model = DistortionModel::None;
  cam.fx = std::sqrt(lambda / B11);
  cam.fy = std::sqrt(lambda / B22);
  cam.cx = -B13 * cam.fx * cam.fx / lambda;
  cam.cy = v0;
  cam.dist.setZero();
  cam.width = width;
  cam.height = height;
  return cam;
}

Pose init_pose(const CameraModel& model, const std::vector<Eigen::Vector2d>& corners,
               const std::vector<Eigen::Vector3d>& board_points) {
  const Eigen::Matrix3d H = estimate_homography(corners, board_points);
  Eigen::Matrix3d K;
  K << model.fx, 0, model.cx, 0, model.fy, model.cy, 0, 0, 1;
  Eigen::Matrix3d M = K.inverse() * H;

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& b : board_points) centroid += b;
  centroid /= double(board_points.size());

  for (int attempt = 0; attempt < 2; ++attempt) {
    const double scale = 2.0 / (M.col(0).norm() + M.col(1).norm());
    const Eigen::Vector3d r1 = scale * M.col(0);
    const Eigen::Vector3d r2 = scale * M.col(1);
    Eigen::Matrix3d R0;
    R0.col(0) = r1;
    R0.col(1) = r2;
    R0.col(2) = r1.cross(r2);
    const Eigen::Matrix3d R = nearest_rotation(R0);
    const Eigen::Vector3d t = scale * M.col(2);

    Pose pose;
    pose.q = Eigen::Quaterniond(R);
    pose.q.normalize();
    pose.t = t;
    if ((pose * centroid).z() > 0) return pose;
    M = -M;  // other decomposition sign
  }
  throw DegenerateConfiguration("no positive-depth pose decomposition");
}

CalibrationResult initialize_intrinsics(const std::vector<Detection>& detections,
                                        DistortionModel model, int width, int height,
                                        double central_fraction) {
  if (detections.size() < 3)
    throw DegenerateConfiguration("need at least 3 views");

  const Eigen::Vector2d center(0.5 * (width - 1), 0.5 * (height - 1));
  const double radius = central_fraction * 0.5 * std::min(width, height);

  std::vector<Eigen::Matrix3d> homographies;
  homographies.reserve(detections.size());
  for (const Detection& det : detections) {
    std::vector<Eigen::Vector2d> sub_c;
    std::vector<Eigen::Vector3d> sub_b;
    if (central_fraction < 1.0) {
      for (std::size_t k = 0; k < det.corners.size(); ++k) {
        if ((det.corners[k] - center).norm() <= radius) {
          sub_c.push_back(det.corners[k]);
          sub_b.push_back(det.board_points[k]);
        }
      }
    }
    // Fall back to the full board when too few central corners survive.
    if (sub_c.size() < std::max<std::size_t>(8, det.corners.size() / 4)) {
      sub_c = det.corners;
      sub_b = det.board_points;
    }
    try {
      homographies.push_back(estimate_homography(sub_c, sub_b));
    } catch (const DegenerateConfiguration&) {
      homographies.push_back(estimate_homography(det.corners, det.board_points));
    }
  }

  CameraModel cam = init_intrinsics(homographies, width, height);
  cam.model = model;
  cam.dist.setZero();

  CalibrationResult result;
  result.cameras.push_back(cam);
  for (const Detection& det : detections) {
    result.view_timestamps.push_back(det.frame_timestamp);
    result.view_poses.push_back(init_pose(cam, det.corners, det.board_points));
  }
  return result;
}

// ---- joint refinement ----

namespace {

struct Layout {
  std::vector<int> intr_offset, intr_size;
  std::vector<int> extr_offset;  // -1 for camera 0
  int view_offset = 0;
  int n_views = 0;
  int n_params = 0;

  int view_block(int v) const { return view_offset + 6 * v; }
};

struct Observation {
  int cam = 0;
  int view = 0;
  const Detection* det = nullptr;
};

struct State {
  std::vector<CameraModel> cams;
  std::vector<Pose> extr;   // extr[0] = identity, fixed
  std::vector<Pose> views;  // board -> camera 0
};

Layout make_layout(const State& state) {
  Layout lay;
  int off = 0;
  for (const auto& cam : state.cams) {
    lay.intr_offset.push_back(off);
    lay.intr_size.push_back(4 + cam.distortion_param_count());
    off += lay.intr_size.back();
  }
  for (std::size_t c = 0; c < state.cams.size(); ++c) {
    lay.extr_offset.push_back(c == 0 ? -1 : off);
    if (c > 0) off += 6;
  }
  lay.view_offset = off;
  lay.n_views = static_cast<int>(state.views.size());
  lay.n_params = off + 6 * lay.n_views;
  return lay;
}

State apply_step(const State& s, const Layout& lay, const Eigen::VectorXd& d) {
  State out = s;
  for (std::size_t c = 0; c < s.cams.size(); ++c) {
    const int o = lay.intr_offset[c];
    out.cams[c].fx += d(o);
    out.cams[c].fy += d(o + 1);
    out.cams[c].cx += d(o + 2);
    out.cams[c].cy += d(o + 3);
    for (int k = 0; k < lay.intr_size[c] - 4; ++k) out.cams[c].dist[k] += d(o + 4 + k);
    if (c > 0) {
      const int e = lay.extr_offset[c];
      out.extr[c] = apply_increment(s.extr[c], Eigen::Vector3d(d.segment<3>(e)),
                                    Eigen::Vector3d(d.segment<3>(e + 3)));
    }
  }
  for (int v = 0; v < lay.n_views; ++v) {
    const int o = lay.view_block(v);
    out.views[static_cast<std::size_t>(v)] =
        apply_increment(s.views[static_cast<std::size_t>(v)],
                        Eigen::Vector3d(d.segment<3>(o)),
                        Eigen::Vector3d(d.segment<3>(o + 3)));
  }
  return out;
}

struct EvalRequest {
  bool with_jacobian = false;
  Eigen::MatrixXd* H = nullptr;
  Eigen::VectorXd* g = nullptr;
  std::vector<double>* view_sq = nullptr;  // squared residual sums per view
  std::vector<int>* view_n = nullptr;      // residual component counts per view
  double* raw_sq = nullptr;                // unweighted sum of squares
};

// Total (possibly robustified) cost, or nothing when a corner projects at or
// behind the optical plane.
std::optional<double> evaluate(const State& state, const Layout& lay,
                               const std::vector<Observation>& obs,
                               const SolverOptions& opt, const EvalRequest& req) {
  double cost = 0;
  if (req.raw_sq) *req.raw_sq = 0;

  for (const Observation& ob : obs) {
    const CameraModel& cam = state.cams[static_cast<std::size_t>(ob.cam)];
    const Pose& view = state.views[static_cast<std::size_t>(ob.view)];
    const Pose& extr = state.extr[static_cast<std::size_t>(ob.cam)];
    const Eigen::Matrix3d R_view = view.rotation();
    const Eigen::Matrix3d R_extr = extr.rotation();
    const int ni = lay.intr_size[static_cast<std::size_t>(ob.cam)];
    const int oi = lay.intr_offset[static_cast<std::size_t>(ob.cam)];
    const int oe = lay.extr_offset[static_cast<std::size_t>(ob.cam)];
    const int ov = lay.view_block(ob.view);

    for (std::size_t k = 0; k < ob.det->corners.size(); ++k) {
      const Eigen::Vector3d& X = ob.det->board_points[k];
      const Eigen::Vector3d rotated = R_view * X;
      const Eigen::Vector3d x0 = rotated + view.t;
      const Eigen::Vector3d xc = (ob.cam == 0) ? x0 : Eigen::Vector3d(R_extr * x0 + extr.t);

      ProjectionJacobians<double> jac;
      std::optional<Eigen::Vector2d> px;
      if (req.with_jacobian)
        px = project_camera_point_jacobians(cam, xc, jac);
      else
        px = project_camera_point(cam, xc);
      if (!px) return std::nullopt;

      const Eigen::Vector2d r = *px - ob.det->corners[k];
      const double e2 = r.squaredNorm();
      if (req.raw_sq) *req.raw_sq += e2;

      double w = 1.0;
      if (opt.huber) {
        const double e = std::sqrt(e2);
        if (e > opt.huber_delta) {
          w = opt.huber_delta / e;
          cost += opt.huber_delta * (2.0 * e - opt.huber_delta);
        } else {
          cost += e2;
        }
      } else {
        cost += e2;
      }

      if (req.view_sq) {
        (*req.view_sq)[static_cast<std::size_t>(ob.view)] += e2;
        (*req.view_n)[static_cast<std::size_t>(ob.view)] += 2;
      }

      if (req.with_jacobian) {
        // Pixel wrt view pose: X0 = Exp(dtheta) R_view X + t_view + dt.
        Eigen::Matrix<double, 2, 6> J_view;
        const Eigen::Matrix3d neg_skew = -skew(rotated);
        if (ob.cam == 0) {
          J_view.leftCols<3>() = jac.d_point * neg_skew;
          J_view.rightCols<3>() = jac.d_point;
        } else {
          J_view.leftCols<3>() = jac.d_point * R_extr * neg_skew;
          J_view.rightCols<3>() = jac.d_point * R_extr;
        }

        Eigen::Matrix<double, 2, 6> J_extr;
        if (ob.cam > 0) {
          J_extr.leftCols<3>() = jac.d_point * (-skew(R_extr * x0));
          J_extr.rightCols<3>() = jac.d_point;
        }

        Eigen::Matrix<double, 2, Eigen::Dynamic> J_intr(2, ni);
        J_intr.leftCols<4>() = jac.d_intrinsics;
        if (ni > 4) J_intr.rightCols(ni - 4) = jac.d_dist.leftCols(ni - 4);

        const double sw = std::sqrt(w);
        const Eigen::Vector2d wr = sw * r;

        // Scatter-add the weighted normal equations.
        auto add_block = [&](int ra, int ca, const auto& A, const auto& B) {
          req.H->block(ra, ca, A.cols(), B.cols()).noalias() +=
              (sw * A).transpose() * (sw * B);
        };
        add_block(oi, oi, J_intr, J_intr);
        add_block(oi, ov, J_intr, J_view);
        add_block(ov, oi, J_view, J_intr);
        add_block(ov, ov, J_view, J_view);
        if (ob.cam > 0) {
          add_block(oe, oe, J_extr, J_extr);
          add_block(oe, oi, J_extr, J_intr);
          add_block(oi, oe, J_intr, J_extr);
          add_block(oe, ov, J_extr, J_view);
          add_block(ov, oe, J_view, J_extr);
          req.g->segment<6>(oe).noalias() += (sw * J_extr).transpose() * wr;
        }
        req.g->segment(oi, ni).noalias() += (sw * J_intr).transpose() * wr;
        req.g->segment<6>(ov).noalias() += (sw * J_view).transpose() * wr;
      }
    }
  }
  return cost;
}

// Associates detections with views by timestamp. Camera 0 detections each
// open a view; later cameras join the nearest view within the window or
// open their own.
void associate_views(const std::vector<std::vector<Detection>>& detections,
                     std::int64_t window_us, std::vector<std::int64_t>& view_ts,
                     std::vector<std::vector<int>>& det_view) {
  view_ts.clear();
  det_view.assign(detections.size(), {});
  for (std::size_t c = 0; c < detections.size(); ++c) {
    std::vector<bool> taken(view_ts.size(), false);
    for (const Detection& det : detections[c]) {
      int best = -1;
      std::int64_t best_dt = window_us;
      if (c > 0) {
        for (std::size_t v = 0; v < view_ts.size(); ++v) {
          if (taken[v]) continue;
          const std::int64_t dt = std::abs(view_ts[v] - det.frame_timestamp);
          if (dt <= best_dt) {
            best_dt = dt;
            best = static_cast<int>(v);
          }
        }
      }
      if (best < 0) {
        view_ts.push_back(det.frame_timestamp);
        taken.push_back(true);
        best = static_cast<int>(view_ts.size()) - 1;
      } else {
        taken[static_cast<std::size_t>(best)] = true;
      }
      det_view[c].push_back(best);
    }
  }
}

}  // namespace

CalibrationResult refine_full(const std::vector<std::vector<Detection>>& detections,
                              const CalibrationResult& init,
                              const SolverOptions& options) {
  if (detections.empty() || detections.size() != init.cameras.size())
    throw Error("detections do not match the initialized cameras");

  State state;
  state.cams = init.cameras;
  state.extr.assign(state.cams.size(), Pose::Identity());
  if (state.cams.size() > 1) {
    if (!init.extrinsic) throw Error("two-camera refinement needs an extrinsic init");
    state.extr[1] = *init.extrinsic;
  }

  std::vector<std::int64_t> view_ts;
  std::vector<std::vector<int>> det_view;
  associate_views(detections, options.match_window_us, view_ts, det_view);

  // Initial pose per view: from init by timestamp, else re-derived from the
  // observing camera's detection.
  state.views.resize(view_ts.size());
  std::vector<bool> have_pose(view_ts.size(), false);
  for (std::size_t v = 0; v < view_ts.size(); ++v) {
    for (std::size_t k = 0; k < init.view_timestamps.size(); ++k) {
      if (std::abs(init.view_timestamps[k] - view_ts[v]) <= options.match_window_us) {
        state.views[v] = init.view_poses[k];
        have_pose[v] = true;
        break;
      }
    }
  }
  std::vector<Observation> obs;
  for (std::size_t c = 0; c < detections.size(); ++c) {
    for (std::size_t d = 0; d < detections[c].size(); ++d) {
      const int v = det_view[c][d];
      obs.push_back({static_cast<int>(c), v, &detections[c][d]});
      if (!have_pose[static_cast<std::size_t>(v)]) {
        const Pose in_cam = init_pose(state.cams[c], detections[c][d].corners,
                                      detections[c][d].board_points);
        state.views[static_cast<std::size_t>(v)] =
            (c == 0) ? in_cam : state.extr[c].inverse() * in_cam;
        have_pose[static_cast<std::size_t>(v)] = true;
      }
    }
  }

  const Layout lay = make_layout(state);
  std::size_t n_residuals = 0;
  for (const Observation& ob : obs) n_residuals += 2 * ob.det->corners.size();
  if (static_cast<int>(n_residuals) < lay.n_params) throw RankDeficient();

  CalibrationResult result;
  result.view_timestamps = view_ts;

  Eigen::MatrixXd H(lay.n_params, lay.n_params);
  Eigen::VectorXd g(lay.n_params);
  H.setZero();
  g.setZero();
  EvalRequest with_jac{true, &H, &g, nullptr, nullptr, nullptr};

  std::optional<double> cost = evaluate(state, lay, obs, options, with_jac);
  if (!cost) throw Error("initial calibration state projects behind the camera");
  result.cost_history.push_back(*cost);

  double lambda = options.lambda0;
  bool converged = false;
  int iterations = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      converged = true;
      break;
    }

    // Marquardt scaling: damp by the diagonal of the normal matrix.
    Eigen::MatrixXd damped = H;
    for (int i = 0; i < lay.n_params; ++i)
      damped(i, i) += lambda * std::max(H(i, i), 1e-12);

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
    bool step_ok = (ldlt.info() == Eigen::Success);
    Eigen::VectorXd delta;
    if (step_ok) {
      delta = ldlt.solve(-g);
      step_ok = delta.allFinite();
    }

    std::optional<double> new_cost;
    State candidate;
    if (step_ok) {
      candidate = apply_step(state, lay, delta);
      EvalRequest plain{};
      new_cost = evaluate(candidate, lay, obs, options, plain);
    }

    ++iterations;
    if (new_cost && *new_cost <= *cost) {
      state = std::move(candidate);
      const double drop = *cost - *new_cost;
      cost = new_cost;
      result.cost_history.push_back(*cost);
      lambda = std::max(lambda * 0.1, 1e-12);

      H.setZero();
      g.setZero();
      if (!evaluate(state, lay, obs, options, with_jac))
        throw Error("accepted state no longer evaluates");  // cannot happen

      if (drop < options.cost_tol * std::max(*cost, 1e-300)) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
  }

  // Final statistics from the refined state.
  std::vector<double> view_sq(state.views.size(), 0.0);
  std::vector<int> view_n(state.views.size(), 0);
  double raw_sq = 0;
  EvalRequest final_req{};
  final_req.view_sq = &view_sq;
  final_req.view_n = &view_n;
  final_req.raw_sq = &raw_sq;
  const std::optional<double> final_cost = evaluate(state, lay, obs, options, final_req);

  result.cameras = state.cams;
  if (state.cams.size() > 1) result.extrinsic = state.extr[1];
  result.view_poses = state.views;
  result.converged = converged && final_cost.has_value();
  result.iterations = iterations;
  result.final_cost = raw_sq;
  result.rms_px = n_residuals > 0 ? std::sqrt(raw_sq / double(n_residuals)) : 0.0;
  result.per_view_rms.resize(state.views.size(), 0.0);
  for (std::size_t v = 0; v < state.views.size(); ++v)
    if (view_n[v] > 0) result.per_view_rms[v] = std::sqrt(view_sq[v] / view_n[v]);

  // Covariance diagonal of the intrinsic blocks from the undamped normal
  // matrix at the optimum.
  const int dof = static_cast<int>(n_residuals) - lay.n_params;
  if (dof > 0) {
    const double sigma2 = raw_sq / dof;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() == Eigen::Success) {
      for (std::size_t c = 0; c < state.cams.size(); ++c) {
        for (int k = 0; k < lay.intr_size[c]; ++k) {
          Eigen::VectorXd e = Eigen::VectorXd::Zero(lay.n_params);
          const int idx = lay.intr_offset[c] + k;
          e(idx) = 1.0;
          const Eigen::VectorXd col = ldlt.solve(e);
          const double var = sigma2 * col(idx);
          result.intrinsic_sigma.push_back(var > 0 ? std::sqrt(var) : 0.0);
        }
      }
    }
  }
  return result;
}

CalibrationResult calibrate_stereo(const CalibrationResult& result_a,
                                   const CalibrationResult& result_b,
                                   const std::vector<std::vector<Detection>>& detections,
                                   const SolverOptions& options) {
  if (result_a.cameras.size() != 1 || result_b.cameras.size() != 1)
    throw Error("calibrate_stereo expects two single-camera results");

  // Matched views by timestamp.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < result_a.view_timestamps.size(); ++i) {
    for (std::size_t j = 0; j < result_b.view_timestamps.size(); ++j) {
      if (std::abs(result_a.view_timestamps[i] - result_b.view_timestamps[j]) <=
          options.match_window_us) {
        pairs.emplace_back(i, j);
        break;
      }
    }
  }
  if (pairs.empty()) throw NoCovisibility();

  // Rotation: chordal mean. Translation: component-wise median.
  Eigen::Matrix3d rot_sum = Eigen::Matrix3d::Zero();
  std::array<std::vector<double>, 3> t_comp;
  for (const auto& [i, j] : pairs) {
    const Pose rel = result_b.view_poses[j] * result_a.view_poses[i].inverse();
    rot_sum += rel.rotation();
    for (int k = 0; k < 3; ++k) t_comp[static_cast<std::size_t>(k)].push_back(rel.t(k));
  }
  Pose rel_init;
  rel_init.q = Eigen::Quaterniond(nearest_rotation(rot_sum));
  rel_init.q.normalize();
  for (int k = 0; k < 3; ++k) {
    auto& v = t_comp[static_cast<std::size_t>(k)];
    std::sort(v.begin(), v.end());
    rel_init.t(k) = v[v.size() / 2];
  }

  CalibrationResult init;
  init.cameras = {result_a.cameras[0], result_b.cameras[0]};
  init.extrinsic = rel_init;
  init.view_timestamps = result_a.view_timestamps;
  init.view_poses = result_a.view_poses;
  // Views seen only by camera b still need poses in the reference frame.
  for (std::size_t j = 0; j < result_b.view_timestamps.size(); ++j) {
    bool matched = false;
    for (const auto& [i, jj] : pairs) matched = matched || jj == j;
    if (!matched) {
      init.view_timestamps.push_back(result_b.view_timestamps[j]);
      init.view_poses.push_back(rel_init.inverse() * result_b.view_poses[j]);
    }
  }

  return refine_full(detections, init, options);
}

double rms_reprojection(const CalibrationResult& result,
                        const std::vector<std::vector<Detection>>& detections,
                        std::int64_t match_window_us) {
  double sq = 0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < detections.size(); ++c) {
    const CameraModel& cam = result.cameras.at(c);
    const Pose extr = (c == 0 || !result.extrinsic) ? Pose::Identity() : *result.extrinsic;
    for (std::size_t d = 0; d < detections[c].size(); ++d) {
      const Detection& det = detections[c][d];
      int view = -1;
      std::int64_t best = match_window_us;
      for (std::size_t v = 0; v < result.view_timestamps.size(); ++v) {
        const std::int64_t dt = std::abs(result.view_timestamps[v] - det.frame_timestamp);
        if (dt <= best) {
          best = dt;
          view = static_cast<int>(v);
        }
      }
      if (view < 0) throw MissingPose(d);
      const Pose to_cam = extr * result.view_poses[static_cast<std::size_t>(view)];
      for (std::size_t k = 0; k < det.corners.size(); ++k) {
        const auto px = project(cam, to_cam, det.board_points[k]);
        if (!px) throw Error("point projects behind the camera");
        sq += (*px - det.corners[k]).squaredNorm();
        n += 2;
      }
    }
  }
  return n > 0 ? std::sqrt(sq / double(n)) : 0.0;
}

}  // namespace evcal
