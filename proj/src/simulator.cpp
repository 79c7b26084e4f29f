#include "evcal/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "evcal/errors.hpp"

namespace evcal {

namespace {

constexpr double kIntensityDark = 0.1;
constexpr double kIntensityLight = 0.9;
constexpr double kIntensityBackground = 0.5;

// 2x2 subsample offsets within a pixel (pixel center at integer coords).
constexpr double kSubOffsets[4][2] = {
    {-0.25, -0.25}, {0.25, -0.25}, {-0.25, 0.25}, {0.25, 0.25}};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void parallel_rows(int height, int threads, const std::function<void(int, int)>& fn) {
  if (threads <= 1 || height < 2 * threads) {
    fn(0, height);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (height + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int r0 = t * chunk;
    const int r1 = std::min(height, r0 + chunk);
    if (r0 >= r1) break;
    pool.emplace_back(fn, r0, r1);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

BoardRenderer::BoardRenderer(const BoardSpec& board, const CameraModel& camera)
    : board_(board), camera_(camera) {
  log_dark_ = std::log(kIntensityDark);
  log_light_ = std::log(kIntensityLight);
  log_background_ = std::log(kIntensityBackground);

  const int w = camera_.width, h = camera_.height;
  ray_x_.assign(4, ImageD(h, w));
  ray_y_.assign(4, ImageD(h, w));
  ray_valid_.assign(4, Image8(h, w));
  for (int s = 0; s < 4; ++s) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Eigen::Vector2d px(x + kSubOffsets[s][0], y + kSubOffsets[s][1]);
        const auto ray = unproject(camera_, px);
        if (ray && ray->z() > 1e-9) {
          ray_x_[s](y, x) = ray->x() / ray->z();
          ray_y_[s](y, x) = ray->y() / ray->z();
          ray_valid_[s](y, x) = 1;
        } else {
          ray_x_[s](y, x) = 0;
          ray_y_[s](y, x) = 0;
          ray_valid_[s](y, x) = 0;
        }
      }
    }
  }
}

void BoardRenderer::check_pose(const Pose& pose, std::int64_t t_us) const {
  const Eigen::Vector3d center_cam = pose * board_.center();
  const Eigen::Vector3d cam_center_board = pose.inverse().t;
  if (center_cam.z() <= 1e-9 || std::abs(cam_center_board.z()) < 1e-9)
    throw DegeneratePose(t_us);
}

double BoardRenderer::sample_log(const Pose&, const Eigen::Matrix3d& rot_t,
                                 const Eigen::Vector3d& cam_center_board, int y,
                                 int x, int s) const {
  if (!ray_valid_[s](y, x)) return log_background_;
  const Eigen::Vector3d dir_cam(ray_x_[s](y, x), ray_y_[s](y, x), 1.0);
  const Eigen::Vector3d dir_board = rot_t * dir_cam;
  if (std::abs(dir_board.z()) < 1e-12) return log_background_;
  const double span = -cam_center_board.z() / dir_board.z();
  if (span <= 0) return log_background_;
  const double bx = cam_center_board.x() + span * dir_board.x();
  const double by = cam_center_board.y() + span * dir_board.y();
  switch (board_shade(board_, bx, by)) {
    case BoardShade::Dark: return log_dark_;
    case BoardShade::Light: return log_light_;
    case BoardShade::Background: return log_background_;
  }
  return log_background_;
}

ImageD BoardRenderer::render_log_intensity(const Pose& pose) const {
  ImageD out(camera_.height, camera_.width);
  out.setConstant(log_background_);
  render_window(pose, {0, 0, camera_.width, camera_.height}, out);
  return out;
}

void BoardRenderer::render_window(const Pose& pose, const PixelRect& rect,
                                  ImageD& out) const {
  check_pose(pose);
  const Eigen::Matrix3d rot_t = pose.rotation().transpose();
  const Eigen::Vector3d cam_center_board = pose.inverse().t;
  for (int y = rect.y0; y < rect.y1; ++y) {
    for (int x = rect.x0; x < rect.x1; ++x) {
      double acc = 0;
      for (int s = 0; s < 4; ++s)
        acc += sample_log(pose, rot_t, cam_center_board, y, x, s);
      out(y, x) = 0.25 * acc;
    }
  }
}

Image8 BoardRenderer::render_intensity_frame(const Pose& pose) const {
  check_pose(pose);
  const Eigen::Matrix3d rot_t = pose.rotation().transpose();
  const Eigen::Vector3d cam_center_board = pose.inverse().t;
  Image8 out(camera_.height, camera_.width);
  for (int y = 0; y < camera_.height; ++y) {
    for (int x = 0; x < camera_.width; ++x) {
      double acc = 0;
      for (int s = 0; s < 4; ++s)
        acc += std::exp(sample_log(pose, rot_t, cam_center_board, y, x, s));
      out(y, x) = static_cast<std::uint8_t>(std::lround(63.75 * acc));
    }
  }
  return out;
}

PixelRect BoardRenderer::board_bbox(const Pose& pose, int pad) const {
  const int per_side = 16;
  double lo_x = 1e30, lo_y = 1e30, hi_x = -1e30, hi_y = -1e30;
  bool any = false;
  auto visit = [&](double bx, double by) {
    const auto px = project(camera_, pose, Eigen::Vector3d(bx, by, 0.0));
    if (!px) return;
    lo_x = std::min(lo_x, px->x());
    hi_x = std::max(hi_x, px->x());
    lo_y = std::min(lo_y, px->y());
    hi_y = std::max(hi_y, px->y());
    any = true;
  };
  for (int i = 0; i <= per_side; ++i) {
    const double u = double(i) / per_side;
    const double bx = board_.min_x() + u * (board_.max_x() - board_.min_x());
    const double by = board_.min_y() + u * (board_.max_y() - board_.min_y());
    visit(bx, board_.min_y());
    visit(bx, board_.max_y());
    visit(board_.min_x(), by);
    visit(board_.max_x(), by);
  }
  if (!any) return {};
  PixelRect r;
  r.x0 = std::max(0, static_cast<int>(std::floor(lo_x)) - pad);
  r.y0 = std::max(0, static_cast<int>(std::floor(lo_y)) - pad);
  r.x1 = std::min(camera_.width, static_cast<int>(std::ceil(hi_x)) + pad + 1);
  r.y1 = std::min(camera_.height, static_cast<int>(std::ceil(hi_y)) + pad + 1);
  return r;
}

// ---- event accumulation ----

EventAccumulator::EventAccumulator(int width, int height, double contrast,
                                   double threshold_sigma, std::uint64_t seed)
    : width_(width),
      height_(height),
      contrast_(contrast),
      threshold_sigma_(threshold_sigma),
      seed_(seed),
      ref_(ImageD::Zero(height, width)),
      last_(ImageD::Zero(height, width)),
      row_events_(static_cast<std::size_t>(height)) {
  if (threshold_sigma_ > 0) {
    row_rng_.reserve(static_cast<std::size_t>(height));
    for (int r = 0; r < height; ++r)
      row_rng_.emplace_back(splitmix64(seed_ + 0x517cc1b727220a95ull * (r + 1)));
  }
}

void EventAccumulator::reset(const ImageD& initial, std::int64_t t_us) {
  ref_ = initial;
  last_ = initial;
  last_t_ = t_us;
  for (auto& v : row_events_) v.clear();
}

double EventAccumulator::next_threshold(int row) {
  if (threshold_sigma_ <= 0) return contrast_;
  std::normal_distribution<double> dist(contrast_, threshold_sigma_);
  const double c = dist(row_rng_[static_cast<std::size_t>(row)]);
  return std::max(c, 0.1 * contrast_);
}

void EventAccumulator::advance_rows(const ImageD& next, std::int64_t t_us,
                                    const PixelRect& rect, int row_begin,
                                    int row_end) {
  // Fire when the change reaches the threshold; the tiny relative slack
  // keeps exact crossings at sample boundaries from being lost to rounding.
  const double slack = 1.0 - 1e-9;
  // With threshold jitter a crossing can fire below the nominal contrast,
  // down to the truncation floor.
  const double gate =
      (threshold_sigma_ > 0 ? 0.1 * contrast_ : contrast_) * slack;
  const std::int64_t t0 = last_t_;
  const double dt = static_cast<double>(t_us - t0);
  for (int y = std::max(row_begin, rect.y0); y < std::min(row_end, rect.y1); ++y) {
    auto& out = row_events_[static_cast<std::size_t>(y)];
    for (int x = rect.x0; x < rect.x1; ++x) {
      const double l_prev = last_(y, x);
      const double l_new = next(y, x);
      double ref = ref_(y, x);
      const double diff = l_new - ref;
      if (diff >= gate || -diff >= gate) {
        // At least one crossing in this interval.
        const double rise = l_new - l_prev;
        while (true) {
          const double thr = next_threshold(y);
          const std::int8_t pol = (l_new - ref >= thr * slack)    ? std::int8_t{1}
                                  : (ref - l_new >= thr * slack) ? std::int8_t{-1}
                                                                 : std::int8_t{0};
          if (pol == 0) break;
          const double target = ref + pol * thr;
          double frac = (std::abs(rise) > 1e-300) ? (target - l_prev) / rise : 1.0;
          frac = std::clamp(frac, 0.0, 1.0);
          const std::int64_t te =
              t0 + static_cast<std::int64_t>(std::llround(frac * dt));
          out.push_back({te, static_cast<std::uint16_t>(x),
                         static_cast<std::uint16_t>(y), pol});
          ref = target;
        }
        ref_(y, x) = ref;
      }
      last_(y, x) = l_new;
    }
  }
}

void EventAccumulator::advance(const ImageD& next, std::int64_t t_us,
                               const PixelRect& rect) {
  advance_rows(next, t_us, rect, 0, height_);
  last_t_ = t_us;
}

std::size_t EventAccumulator::event_count() const {
  std::size_t n = 0;
  for (const auto& v : row_events_) n += v.size();
  return n;
}

std::vector<Event> EventAccumulator::take_events() {
  std::vector<Event> all;
  all.reserve(event_count());
  for (auto& v : row_events_) {
    all.insert(all.end(), v.begin(), v.end());
    v.clear();
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  return all;
}

// ---- generative loop ----

SimResult generate_events(const SimConfig& config, const BoardSpec& board,
                          const Trajectory& traj, std::int64_t t_begin,
                          std::int64_t t_end) {
  if (!config.valid()) throw ConfigError("invalid simulator configuration");
  if (!board.valid()) throw ConfigError("invalid board geometry");
  if (!traj.valid()) throw ConfigError("invalid trajectory");
  if (t_begin < traj.t_begin() || t_end > traj.t_end() || t_end <= t_begin)
    throw OutOfRange("simulation span outside trajectory support");

  BoardRenderer renderer(board, config.camera);

  // Ground-truth frames fall on render samples so that the integrated event
  // stream can be compared against rendered frames without interpolation.
  const std::int64_t steps_per_frame =
      std::max<std::int64_t>(10, std::llround(config.render_rate / config.frame_rate));
  const double frame_dt = 1e6 / config.frame_rate;
  const double step_dt = frame_dt / static_cast<double>(steps_per_frame);
  const std::int64_t n_steps =
      static_cast<std::int64_t>(std::floor((t_end - t_begin) / step_dt));

  auto step_time = [&](std::int64_t i) {
    return t_begin + static_cast<std::int64_t>(std::llround(i * step_dt));
  };

  EventAccumulator acc(config.camera.width, config.camera.height, config.contrast,
                       config.noise.threshold_sigma, config.seed);

  SimResult result;
  result.events.width = config.camera.width;
  result.events.height = config.camera.height;

  Pose pose = sample_pose(traj, t_begin);
  renderer.check_pose(pose, t_begin);
  ImageD l_current = renderer.render_log_intensity(pose);
  acc.reset(l_current, t_begin);
  result.frames.push_back({t_begin, renderer.render_intensity_frame(pose), pose});

  PixelRect bbox_prev = renderer.board_bbox(pose);
  ImageD l_next = l_current;

  for (std::int64_t i = 1; i <= n_steps; ++i) {
    const std::int64_t t = step_time(i);
    pose = sample_pose(traj, t);
    renderer.check_pose(pose, t);

    const PixelRect bbox = renderer.board_bbox(pose);
    PixelRect window;
    if (bbox_prev.empty()) {
      window = bbox;
    } else if (bbox.empty()) {
      window = bbox_prev;
    } else {
      window = {std::min(bbox.x0, bbox_prev.x0), std::min(bbox.y0, bbox_prev.y0),
                std::max(bbox.x1, bbox_prev.x1), std::max(bbox.y1, bbox_prev.y1)};
    }
    bbox_prev = bbox;

    if (!window.empty()) {
      renderer.render_window(pose, window, l_next);
      if (config.threads > 1) {
        parallel_rows(config.camera.height, config.threads,
                      [&](int r0, int r1) { acc.advance_rows(l_next, t, window, r0, r1); });
        acc.set_last_time(t);
      } else {
        acc.advance(l_next, t, window);
      }
    } else {
      acc.set_last_time(t);
    }

    if (i % steps_per_frame == 0) {
      result.frames.push_back({t, renderer.render_intensity_frame(pose), pose});
    }
  }

  std::vector<Event> events = acc.take_events();

  if (config.noise.background_rate > 0) {
    std::mt19937_64 rng(splitmix64(config.seed ^ 0xb5297a4d0f6059cbull));
    const double duration_s = (step_time(n_steps) - t_begin) * 1e-6;
    const double mean = config.noise.background_rate * duration_s *
                        config.camera.width * config.camera.height;
    std::poisson_distribution<std::int64_t> count_dist(mean);
    std::uniform_int_distribution<std::int64_t> t_dist(t_begin, step_time(n_steps));
    std::uniform_int_distribution<int> x_dist(0, config.camera.width - 1);
    std::uniform_int_distribution<int> y_dist(0, config.camera.height - 1);
    std::bernoulli_distribution p_dist(0.5);
    const std::int64_t n = count_dist(rng);
    for (std::int64_t k = 0; k < n; ++k) {
      events.push_back({t_dist(rng), static_cast<std::uint16_t>(x_dist(rng)),
                        static_cast<std::uint16_t>(y_dist(rng)),
                        p_dist(rng) ? std::int8_t{1} : std::int8_t{-1}});
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
  }

  result.events.events = std::move(events);
  return result;
}

}  // namespace evcal
