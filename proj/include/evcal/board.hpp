#ifndef EVCAL_BOARD_HPP
#define EVCAL_BOARD_HPP

#include <Eigen/Dense>
#include <vector>

namespace evcal {

// Planar checkerboard target. rows x cols counts interior corners (where
// four squares meet); the pattern itself has (rows+1) x (cols+1) squares
// plus `margin` rings of light border squares.
//
// Board frame: interior corner (i, j) sits at (j * square_size,
// i * square_size, 0). The square diagonally up-left of the origin corner
// (towards negative x and y) is light.
struct BoardSpec {
  int rows = 6;
  int cols = 9;
  double square_size = 0.04;  // meters
  int margin = 1;             // light border squares

  bool valid() const { return rows >= 3 && cols >= 3 && square_size > 0 && margin >= 0; }

  // Physical extent of the board plus margin, board frame.
  double min_x() const { return -(1 + margin) * square_size; }
  double max_x() const { return (cols + margin) * square_size; }
  double min_y() const { return -(1 + margin) * square_size; }
  double max_y() const { return (rows + margin) * square_size; }

  Eigen::Vector3d center() const {
    return {0.5 * (cols - 1) * square_size, 0.5 * (rows - 1) * square_size, 0.0};
  }
};

// Interior corners in row-major order, z = 0.
std::vector<Eigen::Vector3d> board_corner_points(const BoardSpec& board);

// Reflectance at a board-frame position: dark square, light square, or
// off-board background.
enum class BoardShade { Dark, Light, Background };
BoardShade board_shade(const BoardSpec& board, double x, double y);

}  // namespace evcal

#endif
