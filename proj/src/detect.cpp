#include "evcal/detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <map>

#include "evcal/errors.hpp"
#include "evcal/homography.hpp"

namespace evcal {

std::string to_string(NotFoundReason r) {
  switch (r) {
    case NotFoundReason::TooFewCandidates: return "too_few_candidates";
    case NotFoundReason::GridIncomplete: return "grid_incomplete";
    case NotFoundReason::AmbiguousOrientation: return "ambiguous_orientation";
  }
  return "unknown";
}

namespace {

constexpr int kRefineRadius = 4;       // saddle-fit window half size
constexpr double kSmoothSigma = 1.2;   // detector-wide preblur
constexpr double kTensorSigma = 2.0;   // structure-tensor window
constexpr int kNmsRadius = 4;
constexpr double kResponseRel = 0.02;  // candidate threshold vs. max response
constexpr std::size_t kMaxCandidates = 400;

ImageD to_float(const Image8& img) { return img.cast<double>(); }

std::vector<double> gaussian_kernel(double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[static_cast<std::size_t>(i + r)];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian with replicated borders.
ImageD gaussian_blur(const ImageD& img, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = (static_cast<int>(k.size()) - 1) / 2;
  const int h = static_cast<int>(img.rows()), w = static_cast<int>(img.cols());
  ImageD tmp(h, w), out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i)
        acc += k[static_cast<std::size_t>(i + r)] * img(y, std::clamp(x + i, 0, w - 1));
      tmp(y, x) = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i)
        acc += k[static_cast<std::size_t>(i + r)] * tmp(std::clamp(y + i, 0, h - 1), x);
      out(y, x) = acc;
    }
  }
  return out;
}

double bilinear(const ImageD& img, double x, double y) {
  const int w = static_cast<int>(img.cols()), h = static_cast<int>(img.rows());
  x = std::clamp(x, 0.0, w - 1.0);
  y = std::clamp(y, 0.0, h - 1.0);
  const int x0 = std::min(static_cast<int>(x), w - 2);
  const int y0 = std::min(static_cast<int>(y), h - 2);
  const double fx = x - x0, fy = y - y0;
  return (1 - fx) * (1 - fy) * img(y0, x0) + fx * (1 - fy) * img(y0, x0 + 1) +
         (1 - fx) * fy * img(y0 + 1, x0) + fx * fy * img(y0 + 1, x0 + 1);
}

// Minimum eigenvalue of the smoothed structure tensor.
ImageD min_eig_response(const ImageD& smoothed) {
  const int h = static_cast<int>(smoothed.rows()), w = static_cast<int>(smoothed.cols());
  ImageD gx(h, w), gy(h, w);
  gx.setZero();
  gy.setZero();
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      gx(y, x) = 0.5 * (smoothed(y, x + 1) - smoothed(y, x - 1));
      gy(y, x) = 0.5 * (smoothed(y + 1, x) - smoothed(y - 1, x));
    }
  }
  ImageD a = gaussian_blur(gx * gx, kTensorSigma);
  ImageD b = gaussian_blur(gy * gy, kTensorSigma);
  ImageD c = gaussian_blur(gx * gy, kTensorSigma);
  ImageD resp(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double tr = 0.5 * (a(y, x) + b(y, x));
      const double det = std::sqrt(0.25 * (a(y, x) - b(y, x)) * (a(y, x) - b(y, x)) +
                                   c(y, x) * c(y, x));
      resp(y, x) = tr - det;
    }
  }
  return resp;
}

// Least-squares quadric fit over a fixed (2r+1)^2 window. The design matrix
// pseudo-inverse is constant, computed once.
struct QuadricFitter {
  static constexpr int kN = (2 * kRefineRadius + 1) * (2 * kRefineRadius + 1);
  Eigen::Matrix<double, 6, kN> pinv;

  QuadricFitter() {
    Eigen::Matrix<double, kN, 6> design;
    int row = 0;
    for (int dy = -kRefineRadius; dy <= kRefineRadius; ++dy) {
      for (int dx = -kRefineRadius; dx <= kRefineRadius; ++dx, ++row) {
        design(row, 0) = 1;
        design(row, 1) = dx;
        design(row, 2) = dy;
        design(row, 3) = dx * dx;
        design(row, 4) = dx * dy;
        design(row, 5) = dy * dy;
      }
    }
    pinv = (design.transpose() * design).ldlt().solve(design.transpose());
  }
};

const QuadricFitter& quadric_fitter() {
  static const QuadricFitter fitter;
  return fitter;
}

// One saddle step from the quadric fitted around (x, y). Returns false when
// the surface has no saddle there.
bool saddle_step(const ImageD& img, double x, double y, Eigen::Vector2d& step,
                 double& strength) {
  const auto& fitter = quadric_fitter();
  Eigen::Matrix<double, QuadricFitter::kN, 1> samples;
  int row = 0;
  for (int dy = -kRefineRadius; dy <= kRefineRadius; ++dy)
    for (int dx = -kRefineRadius; dx <= kRefineRadius; ++dx, ++row)
      samples(row) = bilinear(img, x + dx, y + dy);
  const Eigen::Matrix<double, 6, 1> c = fitter.pinv * samples;

  // Hessian [2c3 c4; c4 2c5]; a saddle needs eigenvalues of opposite sign.
  const double det = 4.0 * c[3] * c[5] - c[4] * c[4];
  if (det >= -1e-9) {
    strength = 0;
    return false;
  }
  strength = std::sqrt(-det);
  Eigen::Matrix2d hess;
  hess << 2.0 * c[3], c[4], c[4], 2.0 * c[5];
  step = -hess.inverse() * Eigen::Vector2d(c[1], c[2]);
  return true;
}

RefinedCorner refine_on(const ImageD& smoothed, const Eigen::Vector2d& estimate) {
  RefinedCorner out;
  out.position = estimate;
  const int w = static_cast<int>(smoothed.cols()), h = static_cast<int>(smoothed.rows());
  const double border = kRefineRadius + 1.0;

  Eigen::Vector2d p = estimate;
  double last_step = 1e30;
  for (int it = 0; it < 10; ++it) {
    if (p.x() < border || p.y() < border || p.x() > w - 1 - border ||
        p.y() > h - 1 - border)
      return out;  // saddle_ok stays false
    Eigen::Vector2d step;
    double strength = 0;
    if (!saddle_step(smoothed, p.x(), p.y(), step, strength)) return out;
    if (step.norm() > 1.0) step *= 1.0 / step.norm();
    // Damping breaks the small limit cycles the hard-edged pattern causes.
    if (it >= 4) step *= 0.5;
    p += step;
    out.saddle_strength = strength;
    last_step = step.norm();
    if (last_step < 0.01) break;
  }
  // Best-effort position even on failure; callers may reseed from it.
  out.position = p;
  if (last_step >= 0.05 || (p - estimate).norm() > 2.0) return out;
  out.saddle_ok = true;
  return out;
}

// Opposite ring samples agree at a checkerboard corner while quarter-turn
// samples disagree.
bool centrosymmetric(const ImageD& smoothed, const Eigen::Vector2d& p) {
  constexpr int kAngles = 16;
  for (double radius : {2.5, 4.0}) {
    std::array<double, kAngles> s{};
    for (int k = 0; k < kAngles; ++k) {
      const double a = 2.0 * M_PI * k / kAngles;
      s[static_cast<std::size_t>(k)] =
          bilinear(smoothed, p.x() + radius * std::cos(a), p.y() + radius * std::sin(a));
    }
    double opp = 0, quad = 0, lo = s[0], hi = s[0];
    for (int k = 0; k < kAngles; ++k) {
      opp += std::abs(s[k] - s[(k + kAngles / 2) % kAngles]);
      quad += std::abs(s[k] - s[(k + kAngles / 4) % kAngles]);
      lo = std::min(lo, s[k]);
      hi = std::max(hi, s[k]);
    }
    if (hi - lo < 8.0) return false;     // 8-bit units
    if (quad < 2.0 * opp) return false;  // edge or blob, not a saddle
  }
  return true;
}

struct Candidate {
  Eigen::Vector2d position;
  double response = 0;
  double strength = 0;
};

std::vector<Candidate> find_candidates(const ImageD& smoothed) {
  const ImageD resp = min_eig_response(smoothed);
  const int h = static_cast<int>(resp.rows()), w = static_cast<int>(resp.cols());
  const double max_resp = resp.maxCoeff();
  if (max_resp <= 0) return {};
  const double thresh = kResponseRel * max_resp;

  std::vector<Candidate> raw;
  const int b = kRefineRadius + 2;
  for (int y = b; y < h - b; ++y) {
    for (int x = b; x < w - b; ++x) {
      const double v = resp(y, x);
      if (v < thresh) continue;
      bool is_max = true;
      for (int dy = -kNmsRadius; dy <= kNmsRadius && is_max; ++dy)
        for (int dx = -kNmsRadius; dx <= kNmsRadius && is_max; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int yy = std::clamp(y + dy, 0, h - 1);
          const int xx = std::clamp(x + dx, 0, w - 1);
          // Strict on earlier pixels, lenient on later ones: exactly one
          // winner per plateau.
          if (resp(yy, xx) > v || (resp(yy, xx) == v && (dy < 0 || (dy == 0 && dx < 0))))
            is_max = false;
        }
      if (is_max) raw.push_back({{double(x), double(y)}, v, 0});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Candidate& a, const Candidate& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.position.y() != b.position.y()) return a.position.y() < b.position.y();
    return a.position.x() < b.position.x();
  });
  if (raw.size() > kMaxCandidates) raw.resize(kMaxCandidates);

  // Refine, enforce the saddle and symmetry conditions, deduplicate. A peak
  // of the tensor response can sit over 2 px from the saddle; reseeding once
  // from the converged position keeps the displacement gate meaningful.
  std::vector<Candidate> kept;
  for (const Candidate& c : raw) {
    RefinedCorner r = refine_on(smoothed, c.position);
    if (!r.saddle_ok && r.saddle_strength > 0)
      r = refine_on(smoothed, r.position.array().round().matrix());
    if (!r.saddle_ok) continue;
    if (!centrosymmetric(smoothed, r.position)) continue;
    bool dup = false;
    for (const Candidate& k : kept)
      if ((k.position - r.position).norm() < 2.0) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back({r.position, c.response, r.saddle_strength});
  }
  return kept;
}

// ---- lattice growth ----

using GridKey = std::pair<int, int>;

struct GrownGrid {
  std::map<GridKey, int> cells;  // lattice coord -> candidate index
  int i_min = 0, i_max = 0, j_min = 0, j_max = 0;

  int rows() const { return i_max - i_min + 1; }
  int cols() const { return j_max - j_min + 1; }
};

int nearest_unused(const std::vector<Candidate>& cands, const std::vector<bool>& used,
                   const Eigen::Vector2d& pred, double gate) {
  int best = -1;
  double best_d = gate;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (used[i]) continue;
    const double d = (cands[i].position - pred).norm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::optional<GrownGrid> grow_from(const std::vector<Candidate>& cands, int seed,
                                   const Eigen::Vector2d& v_row,
                                   const Eigen::Vector2d& v_col) {
  constexpr int kSpanLimit = 64;
  GrownGrid grid;
  std::vector<bool> used(cands.size(), false);
  grid.cells[{0, 0}] = seed;
  used[static_cast<std::size_t>(seed)] = true;

  const std::array<GridKey, 4> dirs = {GridKey{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  bool added = true;
  while (added) {
    added = false;
    // Snapshot: std::map iteration order is stable and deterministic.
    std::vector<GridKey> filled;
    filled.reserve(grid.cells.size());
    for (const auto& [key, idx] : grid.cells) filled.push_back(key);

    for (const GridKey& key : filled) {
      const auto [i, j] = key;
      for (const auto& [di, dj] : dirs) {
        const GridKey target{i + di, j + dj};
        if (grid.cells.count(target)) continue;
        if (std::abs(target.first) > kSpanLimit || std::abs(target.second) > kSpanLimit)
          continue;

        const Eigen::Vector2d p1 = cands[static_cast<std::size_t>(grid.cells[key])].position;
        Eigen::Vector2d pred;
        double step_len;
        const auto it0 = grid.cells.find({i - di, j - dj});
        if (it0 != grid.cells.end()) {
          const Eigen::Vector2d p0 = cands[static_cast<std::size_t>(it0->second)].position;
          const auto itm = grid.cells.find({i - 2 * di, j - 2 * dj});
          if (itm != grid.cells.end()) {
            const Eigen::Vector2d pm = cands[static_cast<std::size_t>(itm->second)].position;
            pred = 3.0 * p1 - 3.0 * p0 + pm;  // constant-curvature continuation
          } else {
            pred = 2.0 * p1 - p0;
          }
          step_len = (p1 - p0).norm();
        } else {
          const Eigen::Vector2d v = (di != 0) ? v_row * di : v_col * dj;
          pred = p1 + v;
          step_len = v.norm();
        }

        const int found = nearest_unused(cands, used, pred, 0.35 * step_len);
        if (found >= 0) {
          grid.cells[target] = found;
          used[static_cast<std::size_t>(found)] = true;
          grid.i_min = std::min(grid.i_min, target.first);
          grid.i_max = std::max(grid.i_max, target.first);
          grid.j_min = std::min(grid.j_min, target.second);
          grid.j_max = std::max(grid.j_max, target.second);
          added = true;
        }
      }
    }
  }
  if (grid.cells.size() < 4) return std::nullopt;
  return grid;
}

// Dense corner matrix from a complete grown grid; empty when any cell of the
// bounding lattice box is missing.
std::optional<std::vector<Eigen::Vector2d>> dense_grid(
    const GrownGrid& grid, const std::vector<Candidate>& cands,
    std::vector<double>* strengths) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(static_cast<std::size_t>(grid.rows()) * grid.cols());
  for (int i = grid.i_min; i <= grid.i_max; ++i) {
    for (int j = grid.j_min; j <= grid.j_max; ++j) {
      const auto it = grid.cells.find({i, j});
      if (it == grid.cells.end()) return std::nullopt;
      out.push_back(cands[static_cast<std::size_t>(it->second)].position);
      if (strengths)
        strengths->push_back(cands[static_cast<std::size_t>(it->second)].strength);
    }
  }
  return out;
}

// All quads convex with one consistent winding.
bool quads_consistent(const std::vector<Eigen::Vector2d>& g, int rows, int cols) {
  double sign = 0;
  for (int i = 0; i + 1 < rows; ++i) {
    for (int j = 0; j + 1 < cols; ++j) {
      const std::array<Eigen::Vector2d, 4> q = {
          g[static_cast<std::size_t>(i) * cols + j],
          g[static_cast<std::size_t>(i) * cols + j + 1],
          g[static_cast<std::size_t>(i + 1) * cols + j + 1],
          g[static_cast<std::size_t>(i + 1) * cols + j]};
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector2d e0 = q[static_cast<std::size_t>((k + 1) % 4)] - q[static_cast<std::size_t>(k)];
        const Eigen::Vector2d e1 = q[static_cast<std::size_t>((k + 2) % 4)] - q[static_cast<std::size_t>((k + 1) % 4)];
        const double cross = e0.x() * e1.y() - e0.y() * e1.x();
        if (cross == 0) return false;
        if (sign == 0) sign = cross > 0 ? 1 : -1;
        if (cross * sign < 0) return false;
      }
    }
  }
  return true;
}

struct GridView {
  const std::vector<Eigen::Vector2d>* grid;
  int rows, cols;
  bool transpose, flip_i, flip_j;

  Eigen::Vector2d at(int i, int j) const {
    int a = flip_i ? rows - 1 - i : i;
    int b = flip_j ? cols - 1 - j : j;
    if (transpose)
      return (*grid)[static_cast<std::size_t>(b) * rows + a];  // source is cols x rows
    return (*grid)[static_cast<std::size_t>(a) * cols + b];
  }
};

// Local lattice steps: central difference in the grid interior, one-sided
// at the borders.
Eigen::Vector2d local_step_i(const GridView& v, int i, int j) {
  const int i0 = std::max(0, i - 1), i1 = std::min(v.rows - 1, i + 1);
  return (v.at(i1, j) - v.at(i0, j)) / double(i1 - i0);
}
Eigen::Vector2d local_step_j(const GridView& v, int i, int j) {
  const int j0 = std::max(0, j - 1), j1 = std::min(v.cols - 1, j + 1);
  return (v.at(i, j1) - v.at(i, j0)) / double(j1 - j0);
}

// True when the cell-diagonal pair toward (-vi-vj)/(+vi+vj) is lighter than
// the anti-diagonal pair, i.e. corner (i+j) should be even.
bool main_diagonal_lighter(const ImageD& smoothed, const GridView& v, int i, int j) {
  const Eigen::Vector2d c = v.at(i, j);
  const Eigen::Vector2d vi = local_step_i(v, i, j);
  const Eigen::Vector2d vj = local_step_j(v, i, j);
  const Eigen::Vector2d diag = 0.5 * (vi + vj);
  const Eigen::Vector2d anti = 0.5 * (vi - vj);
  const double main_mean = 0.5 * (bilinear(smoothed, (c + diag).x(), (c + diag).y()) +
                                  bilinear(smoothed, (c - diag).x(), (c - diag).y()));
  const double anti_mean = 0.5 * (bilinear(smoothed, (c + anti).x(), (c + anti).y()) +
                                  bilinear(smoothed, (c - anti).x(), (c - anti).y()));
  return main_mean > anti_mean;
}

bool variant_consistent(const ImageD& smoothed, const GridView& v) {
  // Right-handed lattice in image coordinates (x right, y down).
  const Eigen::Vector2d vi = v.at(1, 0) - v.at(0, 0);
  const Eigen::Vector2d vj = v.at(0, 1) - v.at(0, 0);
  if (vj.x() * vi.y() - vj.y() * vi.x() <= 0) return false;

  int match = 0;
  const int total = v.rows * v.cols;
  for (int i = 0; i < v.rows; ++i)
    for (int j = 0; j < v.cols; ++j) {
      const bool lighter = main_diagonal_lighter(smoothed, v, i, j);
      if (lighter == (((i + j) % 2) == 0)) ++match;
    }
  return match >= (9 * total + 9) / 10;
}

}  // namespace

std::vector<RefinedCorner> refine_subpixel(const Frame& frame,
                                           const std::vector<Eigen::Vector2d>& estimates) {
  const ImageD smoothed = gaussian_blur(to_float(frame.pixels), kSmoothSigma);
  std::vector<RefinedCorner> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) out.push_back(refine_on(smoothed, e));
  return out;
}

DetectResult detect_checkerboard(const Frame& frame, const BoardSpec& board) {
  DetectResult result;
  result.reason = NotFoundReason::TooFewCandidates;
  if (!board.valid() || frame.width() < 10 * board.cols ||
      frame.height() < 10 * board.rows)
    return result;

  const ImageD smoothed = gaussian_blur(to_float(frame.pixels), kSmoothSigma);
  const std::vector<Candidate> cands = find_candidates(smoothed);
  const std::size_t need = static_cast<std::size_t>(board.rows) * board.cols;
  if (cands.size() < need) return result;

  // Seeds: strongest candidates near the centroid of all candidates.
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& c : cands) centroid += c.position;
  centroid /= double(cands.size());

  std::vector<int> seed_order(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) seed_order[i] = static_cast<int>(i);
  std::sort(seed_order.begin(), seed_order.end(), [&](int a, int b) {
    const double da = (cands[static_cast<std::size_t>(a)].position - centroid).norm();
    const double db = (cands[static_cast<std::size_t>(b)].position - centroid).norm();
    if (da != db) return da < db;
    return a < b;
  });

  result.reason = NotFoundReason::GridIncomplete;

  const int max_seeds = std::min<int>(5, static_cast<int>(seed_order.size()));
  for (int s = 0; s < max_seeds; ++s) {
    const int seed = seed_order[static_cast<std::size_t>(s)];
    const Eigen::Vector2d sp = cands[static_cast<std::size_t>(seed)].position;

    // Neighbour list by distance for lattice-vector hypotheses.
    std::vector<std::pair<double, int>> nn;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (static_cast<int>(i) == seed) continue;
      nn.emplace_back((cands[i].position - sp).norm(), static_cast<int>(i));
    }
    std::sort(nn.begin(), nn.end());
    const int n_consider = std::min<int>(6, static_cast<int>(nn.size()));

    for (int a = 0; a < n_consider; ++a) {
      const Eigen::Vector2d v1 = cands[static_cast<std::size_t>(nn[static_cast<std::size_t>(a)].second)].position - sp;
      for (int b = a + 1; b < n_consider; ++b) {
        const Eigen::Vector2d v2 = cands[static_cast<std::size_t>(nn[static_cast<std::size_t>(b)].second)].position - sp;
        const double cosang = v1.dot(v2) / (v1.norm() * v2.norm());
        if (std::abs(cosang) > 0.7) continue;  // need a transverse pair
        const double ratio = v2.norm() / v1.norm();
        if (ratio < 0.5 || ratio > 2.0) continue;

        const auto grid = grow_from(cands, seed, v2, v1);
        if (!grid) continue;
        const bool straight = grid->rows() == board.rows && grid->cols() == board.cols;
        const bool transposed = grid->rows() == board.cols && grid->cols() == board.rows;
        if (!straight && !transposed) continue;
        if (grid->cells.size() != need) continue;

        std::vector<double> strengths;
        const auto dense = dense_grid(*grid, cands, &strengths);
        if (!dense) continue;

        // Orientation canonicalization: exactly one of the eight index
        // variants must be right-handed with the expected colour parity.
        std::vector<GridView> passing;
        for (int tr = 0; tr < 2; ++tr) {
          const int vr = tr ? grid->cols() : grid->rows();
          const int vc = tr ? grid->rows() : grid->cols();
          if (vr != board.rows || vc != board.cols) continue;
          for (int fi = 0; fi < 2; ++fi)
            for (int fj = 0; fj < 2; ++fj) {
              GridView view{&*dense, board.rows, board.cols, tr != 0, fi != 0, fj != 0};
              if (variant_consistent(smoothed, view)) passing.push_back(view);
            }
        }
        if (passing.size() != 1) {
          result.reason = NotFoundReason::AmbiguousOrientation;
          continue;
        }
        const GridView& view = passing.front();

        std::vector<Eigen::Vector2d> corners;
        corners.reserve(need);
        for (int i = 0; i < board.rows; ++i)
          for (int j = 0; j < board.cols; ++j) corners.push_back(view.at(i, j));

        if (!quads_consistent(corners, board.rows, board.cols)) {
          result.reason = NotFoundReason::GridIncomplete;
          continue;
        }

        // Tentative-homography consistency: the grid must be a plausible
        // projective image of the board lattice (loose gate, distortion is
        // absorbed elsewhere).
        std::vector<Eigen::Vector3d> bpts = board_corner_points(board);
        try {
          const Eigen::Matrix3d H = estimate_homography(corners, bpts);
          double diag = (corners.front() - corners.back()).norm();
          double worst = 0;
          for (std::size_t k = 0; k < corners.size(); ++k) {
            Eigen::Vector3d q = H * Eigen::Vector3d(bpts[k].x(), bpts[k].y(), 1.0);
            if (std::abs(q.z()) < 1e-12) { worst = 1e30; break; }
            worst = std::max(worst, (q.hnormalized() - corners[k]).norm());
          }
          if (worst > 0.35 * diag) {
            result.reason = NotFoundReason::GridIncomplete;
            continue;
          }
        } catch (const DegenerateConfiguration&) {
          result.reason = NotFoundReason::GridIncomplete;
          continue;
        }

        Detection det;
        det.frame_timestamp = frame.timestamp;
        det.rows = board.rows;
        det.cols = board.cols;
        det.corners = std::move(corners);
        det.board_points = std::move(bpts);
        double q = 0;
        for (double v : strengths) q += v;
        det.quality = strengths.empty() ? 0.0 : q / double(strengths.size());
        result.detection = std::move(det);
        return result;
      }
    }
  }
  return result;
}

double detection_ratio(int detections_a, int detections_b) {
  if (detections_b == 0) throw DivisionByZero();
  return static_cast<double>(detections_a) / static_cast<double>(detections_b);
}

void accumulate_coverage(CoverageMap& map, const Detection& det) {
  // Cells are half-open with boundary corners assigned to the lower-index
  // cell: ceil(u) - 1 instead of floor(u).
  for (const auto& c : det.corners) {
    int cx = static_cast<int>(std::ceil(c.x() * map.cells_x / map.width)) - 1;
    int cy = static_cast<int>(std::ceil(c.y() * map.cells_y / map.height)) - 1;
    cx = std::clamp(cx, 0, map.cells_x - 1);
    cy = std::clamp(cy, 0, map.cells_y - 1);
    ++map.counts(cy, cx);
  }
}

}  // namespace evcal
