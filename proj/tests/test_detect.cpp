#include <doctest.h>

#include <cmath>
#include <random>

#include "calib_test_util.hpp"
#include "evcal/detect.hpp"
#include "evcal/errors.hpp"
#include "evcal/simulator.hpp"

using namespace evcal;

namespace {

Frame render_frame(const BoardRenderer& renderer, const Pose& pose,
                   std::int64_t t = 0) {
  Frame f;
  f.timestamp = t;
  f.pixels = renderer.render_intensity_frame(pose);
  f.source = FrameSource::Rendered;
  return f;
}

// Largest corner error against the analytic projections, plus the sum for
// the mean.
void corner_errors(const Detection& det, const Detection& analytic, double& sum,
                   double& worst) {
  REQUIRE(det.corners.size() == analytic.corners.size());
  for (std::size_t k = 0; k < det.corners.size(); ++k) {
    const double e = (det.corners[k] - analytic.corners[k]).norm();
    sum += e;
    worst = std::max(worst, e);
  }
}

}  // namespace

TEST_CASE("rendered fronto-parallel board is detected to 0.1 px") {
  const BoardSpec board = test::gt_board();
  const CameraModel cam = test::gt_camera(DistortionModel::None);
  BoardRenderer renderer(board, cam);

  Pose pose;
  pose.t = -board.center();
  pose.t.z() = 0.55;

  const Frame frame = render_frame(renderer, pose);
  const DetectResult res = detect_checkerboard(frame, board);
  REQUIRE(res);
  const auto analytic = test::analytic_detection(cam, pose, board);
  REQUIRE(analytic);

  double sum = 0, worst = 0;
  corner_errors(*res.detection, *analytic, sum, worst);
  CHECK(worst < 0.1);
  CHECK(res.detection->quality > 0);
}

TEST_CASE("uniform frames report too few candidates") {
  Frame frame;
  frame.pixels = Image8(200, 200);
  frame.pixels.setConstant(128);
  const DetectResult res = detect_checkerboard(frame, test::gt_board());
  CHECK(!res);
  CHECK(res.reason == NotFoundReason::TooFewCandidates);
}

TEST_CASE("mirrored frames detect with a consistently mapped origin") {
  const BoardSpec board = test::gt_board();
  const CameraModel cam = test::gt_camera(DistortionModel::None);
  BoardRenderer renderer(board, cam);

  const Pose pose = test::look_pose(board, 0.15, -0.1, 0.05, 0.0, 0.0, 0.6);
  const Frame frame = render_frame(renderer, pose);

  Frame mirrored;
  mirrored.timestamp = frame.timestamp;
  mirrored.pixels = frame.pixels.rowwise().reverse();

  const DetectResult res = detect_checkerboard(mirrored, board);
  REQUIRE(res);

  // With even rows, the mirror image canonicalizes with the origin at the
  // reflected projection of board corner (rows-1, 0).
  const auto analytic = test::analytic_detection(cam, pose, board);
  REQUIRE(analytic);
  const Eigen::Vector2d phys = analytic->corner(board.rows - 1, 0);
  const Eigen::Vector2d expected(cam.width - 1 - phys.x(), phys.y());
  CHECK((res.detection->corner(0, 0) - expected).norm() < 0.1);
}

TEST_CASE("saddle refinement recovers an ideal quadric to 0.02 px") {
  // I(x, y) = (x - x0)(y - y0) + 128 over a small patch.
  const double x0 = 24.0, y0 = 21.0;
  Frame frame;
  frame.pixels = Image8(48, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) {
      const double v = (x - x0) * (y - y0) + 128.0;
      frame.pixels(y, x) = std::uint8_t(std::lround(std::clamp(v, 0.0, 255.0)));
    }

  const auto refined =
      refine_subpixel(frame, {Eigen::Vector2d(x0 + 1.1, y0 - 1.0)});
  REQUIRE(refined.size() == 1);
  CHECK(refined[0].saddle_ok);
  CHECK((refined[0].position - Eigen::Vector2d(x0, y0)).norm() < 0.02);

  // An estimate already at the saddle does not move.
  const auto fixed = refine_subpixel(frame, {Eigen::Vector2d(x0, y0)});
  REQUIRE(fixed[0].saddle_ok);
  CHECK((fixed[0].position - Eigen::Vector2d(x0, y0)).norm() < 1e-9);
}

TEST_CASE("flat windows are flagged as non-saddles") {
  Frame frame;
  frame.pixels = Image8(64, 64);
  frame.pixels.setConstant(77);
  const auto refined = refine_subpixel(frame, {Eigen::Vector2d(32, 32)});
  REQUIRE(refined.size() == 1);
  CHECK(!refined[0].saddle_ok);
}

TEST_CASE("detection is deterministic and shift-equivariant") {
  const BoardSpec board = test::gt_board();
  const CameraModel cam = test::gt_camera(DistortionModel::None);
  BoardRenderer renderer(board, cam);
  const Pose pose = test::look_pose(board, 0.2, 0.15, 0.3, 0.01, 0.0, 0.62);
  const Frame frame = render_frame(renderer, pose);

  const DetectResult a = detect_checkerboard(frame, board);
  const DetectResult b = detect_checkerboard(frame, board);
  REQUIRE(a);
  REQUIRE(b);
  for (std::size_t k = 0; k < a.detection->corners.size(); ++k)
    CHECK(a.detection->corners[k] == b.detection->corners[k]);

  // Integer shift with constant padding shifts every corner exactly.
  const int dx = 7, dy = -4;
  Frame shifted;
  shifted.pixels = Image8(frame.pixels.rows(), frame.pixels.cols());
  shifted.pixels.setConstant(128);
  for (int y = 0; y < frame.pixels.rows(); ++y) {
    for (int x = 0; x < frame.pixels.cols(); ++x) {
      const int sy = y + dy, sx = x + dx;
      if (sy >= 0 && sy < frame.pixels.rows() && sx >= 0 && sx < frame.pixels.cols())
        shifted.pixels(sy, sx) = frame.pixels(y, x);
    }
  }
  const DetectResult c = detect_checkerboard(shifted, board);
  REQUIRE(c);
  for (std::size_t k = 0; k < a.detection->corners.size(); ++k) {
    const Eigen::Vector2d expected =
        a.detection->corners[k] + Eigen::Vector2d(dx, dy);
    CHECK((c.detection->corners[k] - expected).norm() < 1e-9);
  }
}

TEST_CASE("subpixel accuracy across 100 random poses") {
  const BoardSpec board = test::gt_board();
  const CameraModel cam = test::gt_camera(DistortionModel::None);
  BoardRenderer renderer(board, cam);

  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> tilt(-0.4, 0.4);
  std::uniform_real_distribution<double> roll(-0.6, 0.6);
  std::uniform_real_distribution<double> off(-0.05, 0.05);
  std::uniform_real_distribution<double> depth(0.5, 0.9);

  int poses_done = 0;
  int detected = 0;
  double err_sum = 0, err_max = 0;
  std::size_t corners_total = 0;

  while (poses_done < 100) {
    const Pose pose = test::look_pose(board, tilt(rng), tilt(rng), roll(rng),
                                      off(rng), off(rng), depth(rng));
    const auto analytic = test::analytic_detection(cam, pose, board);
    if (!analytic) continue;
    // Keep refinement windows inside the image.
    bool margin_ok = true;
    for (const auto& c : analytic->corners)
      margin_ok = margin_ok && c.x() > 8 && c.y() > 8 && c.x() < cam.width - 9 &&
                  c.y() < cam.height - 9;
    if (!margin_ok) continue;
    ++poses_done;

    const Frame frame = render_frame(renderer, pose);
    const DetectResult res = detect_checkerboard(frame, board);
    if (!res) continue;
    ++detected;
    corner_errors(*res.detection, *analytic, err_sum, err_max);
    corners_total += analytic->corners.size();
  }

  CHECK(detected == 100);
  REQUIRE(corners_total > 0);
  CHECK(err_sum / double(corners_total) < 0.1);
  CHECK(err_max < 0.3);
}

TEST_CASE("detection ratio arithmetic") {
  CHECK(detection_ratio(54, 54) == doctest::Approx(1.0));
  CHECK(detection_ratio(0, 54) == doctest::Approx(0.0));
  CHECK(detection_ratio(53, 54) == doctest::Approx(0.981).epsilon(1e-3));
  CHECK_THROWS_AS(detection_ratio(1, 0), DivisionByZero);
}

TEST_CASE("coverage counts corners into half-open cells") {
  CoverageMap map(100, 100, 20, 20);

  Detection det;
  det.rows = 6;
  det.cols = 9;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 9; ++j)
      det.corners.emplace_back(10.0 + 8.0 * j, 12.0 + 9.0 * i);
  accumulate_coverage(map, det);
  CHECK(map.total() == 54);

  // A corner exactly on a cell boundary lands in the lower-index cell.
  CoverageMap edge(100, 100, 20, 20);
  Detection one;
  one.rows = one.cols = 1;
  one.corners.emplace_back(5.0, 10.0);  // boundaries of cells 1 and 2
  accumulate_coverage(edge, one);
  CHECK(edge.counts(1, 0) == 1);

  // Random cloud against an independent histogram.
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  CoverageMap cloud(100, 100, 20, 20);
  Eigen::ArrayXXi expected = Eigen::ArrayXXi::Zero(20, 20);
  Detection pts;
  pts.rows = pts.cols = 1;
  for (int k = 0; k < 2000; ++k) {
    const double x = u(rng), y = u(rng);
    pts.corners.clear();
    pts.corners.emplace_back(x, y);
    accumulate_coverage(cloud, pts);
    int cx = int(std::ceil(x * 20.0 / 100.0)) - 1;
    int cy = int(std::ceil(y * 20.0 / 100.0)) - 1;
    cx = std::clamp(cx, 0, 19);
    cy = std::clamp(cy, 0, 19);
    ++expected(cy, cx);
  }
  CHECK((cloud.counts == expected).all());
  CHECK(cloud.nonzero_fraction() > 0.9);
}
