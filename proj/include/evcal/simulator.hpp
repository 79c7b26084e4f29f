#ifndef EVCAL_SIMULATOR_HPP
#define EVCAL_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "evcal/board.hpp"
#include "evcal/camera_model.hpp"
#include "evcal/event.hpp"
#include "evcal/frame.hpp"
#include "evcal/trajectory.hpp"

namespace evcal {

struct SimNoise {
  double threshold_sigma = 0.0;      // per-event jitter on the contrast threshold
  double background_rate = 0.0;      // events per pixel per second, uniform
};

struct SimConfig {
  CameraModel camera;
  double contrast = 0.3;             // threshold C, log-intensity units
  double render_rate = 250.0;        // Hz, internal supersampling of L
  double frame_rate = 20.0;          // Hz, ground-truth frame output
  SimNoise noise;
  std::uint64_t seed = 0;
  int threads = 1;

  bool valid() const {
    return contrast > 0 && render_rate >= 10.0 * frame_rate && frame_rate > 0;
  }
};

struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0,x1) x [y0,y1)
  bool empty() const { return x1 <= x0 || y1 <= y0; }
};

// Renders the planar target through a distorted camera. The pixel-to-ray
// table is precomputed once per camera; each render is a plane intersection
// plus a shade lookup, 2x2 supersampled.
class BoardRenderer {
 public:
  BoardRenderer(const BoardSpec& board, const CameraModel& camera);

  // Log intensity of every pixel. Throws DegeneratePose when the board
  // plane passes through the optical center or the board center is behind
  // the camera.
  ImageD render_log_intensity(const Pose& pose) const;

  // Same geometry, linear intensity quantized to 8 bits.
  Image8 render_intensity_frame(const Pose& pose) const;

  // Log intensity restricted to a pixel rect, written into `out` (full
  // frame sized). Pixels outside the rect are left untouched.
  void render_window(const Pose& pose, const PixelRect& rect, ImageD& out) const;

  // Image-plane bounding box of the board incl. margin, padded; empty when
  // the board is entirely out of view.
  PixelRect board_bbox(const Pose& pose, int pad = 8) const;

  void check_pose(const Pose& pose, std::int64_t t_us = -1) const;

  int width() const { return camera_.width; }
  int height() const { return camera_.height; }

 private:
  double sample_log(const Pose& pose, const Eigen::Matrix3d& rot_t,
                    const Eigen::Vector3d& cam_center_board, int y, int x,
                    int s) const;

  BoardSpec board_;
  CameraModel camera_;
  // Undistorted normalized ray (x, y) per pixel per 2x2 subsample.
  std::vector<ImageD> ray_x_, ray_y_;
  std::vector<Image8> ray_valid_;
  double log_dark_, log_light_, log_background_;
};

// Per-pixel event generation. Feed it log-intensity samples in time order;
// it fires an event whenever the linearly interpolated signal crosses the
// reference by the contrast threshold, then moves the reference by one
// threshold step. Events are buffered per row so that row-parallel callers
// stay deterministic.
class EventAccumulator {
 public:
  EventAccumulator(int width, int height, double contrast,
                   double threshold_sigma = 0.0, std::uint64_t seed = 0);

  // Sets the reference signal; no events are generated.
  void reset(const ImageD& initial, std::int64_t t_us);

  // Advances pixels inside `rect` to the new sample; everything outside is
  // assumed unchanged. Pass the full-frame rect to scan every pixel.
  void advance(const ImageD& next, std::int64_t t_us, const PixelRect& rect);

  // Row range variant used by parallel drivers.
  void advance_rows(const ImageD& next, std::int64_t t_us, const PixelRect& rect,
                    int row_begin, int row_end);

  void set_last_time(std::int64_t t_us) { last_t_ = t_us; }

  // All buffered events in row-major buffer order, sorted by timestamp
  // (stable, so equal timestamps keep row order).
  std::vector<Event> take_events();

  std::size_t event_count() const;

 private:
  int width_, height_;
  double contrast_, threshold_sigma_;
  std::uint64_t seed_;
  ImageD ref_;      // reference level (last event, or initial)
  ImageD last_;     // previous sample
  std::int64_t last_t_ = 0;
  std::vector<std::vector<Event>> row_events_;
  std::vector<std::mt19937_64> row_rng_;

  double next_threshold(int row);
};

struct GroundTruthFrame {
  std::int64_t t_us = 0;
  Image8 image;
  Pose pose;
};

struct SimResult {
  EventStream events;
  std::vector<GroundTruthFrame> frames;
};

// Runs the generative model over [t_begin, t_end] of the trajectory span:
// renders L at render_rate, fires events on threshold crossings, emits
// ground-truth frames and poses at frame_rate. Deterministic for a fixed
// config and seed.
SimResult generate_events(const SimConfig& config, const BoardSpec& board,
                          const Trajectory& traj, std::int64_t t_begin,
                          std::int64_t t_end);

}  // namespace evcal

#endif
