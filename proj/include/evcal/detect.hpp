#ifndef EVCAL_DETECT_HPP
#define EVCAL_DETECT_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "evcal/board.hpp"
#include "evcal/frame.hpp"

namespace evcal {

// Complete interior-corner grid with subpixel positions, row-major, paired
// with the known board geometry. Partial grids are never produced.
struct Detection {
  std::int64_t frame_timestamp = 0;
  int rows = 0;
  int cols = 0;
  std::vector<Eigen::Vector2d> corners;       // rows*cols, row-major
  std::vector<Eigen::Vector3d> board_points;  // matching, z = 0
  double quality = 0.0;                       // mean local saddle response

  const Eigen::Vector2d& corner(int i, int j) const {
    return corners[static_cast<std::size_t>(i) * cols + j];
  }
};

enum class NotFoundReason { TooFewCandidates, GridIncomplete, AmbiguousOrientation };

std::string to_string(NotFoundReason r);

struct DetectResult {
  std::optional<Detection> detection;
  NotFoundReason reason = NotFoundReason::TooFewCandidates;

  explicit operator bool() const { return detection.has_value(); }
};

// Finds the full interior-corner grid: minimum-eigenvalue corner candidates,
// saddle filtering, lattice growth, orientation canonicalization. Output is
// deterministic for a given frame; whole grid or nothing.
DetectResult detect_checkerboard(const Frame& frame, const BoardSpec& board);

// Iterative saddle-point refinement on a smoothed local quadric fit.
// saddle_ok is false when the fitted surface has no saddle (the spec's
// whole-board policy then rejects the detection).
struct RefinedCorner {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  bool saddle_ok = false;
  double saddle_strength = 0.0;
};

std::vector<RefinedCorner> refine_subpixel(const Frame& frame,
                                           const std::vector<Eigen::Vector2d>& estimates);

// a / b. Throws DivisionByZero when b = 0.
double detection_ratio(int detections_a, int detections_b);

// Fixed accumulation grid over the image plane counting detected corners.
struct CoverageMap {
  int width = 0, height = 0;    // image size, pixels
  int cells_x = 20, cells_y = 20;
  Eigen::ArrayXXi counts;       // (cells_y, cells_x)

  CoverageMap() = default;
  CoverageMap(int image_width, int image_height, int nx = 20, int ny = 20)
      : width(image_width), height(image_height), cells_x(nx), cells_y(ny),
        counts(Eigen::ArrayXXi::Zero(ny, nx)) {}

  int total() const { return counts.sum(); }
  double nonzero_fraction() const {
    return static_cast<double>((counts > 0).count()) /
           static_cast<double>(counts.size());
  }
};

// Each corner increments exactly one cell; cells are half-open so boundary
// corners land in the lower-index cell.
void accumulate_coverage(CoverageMap& map, const Detection& det);

}  // namespace evcal

#endif
