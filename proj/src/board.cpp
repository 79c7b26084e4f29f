#include "evcal/board.hpp"

#include <cmath>

namespace evcal {

std::vector<Eigen::Vector3d> board_corner_points(const BoardSpec& board) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(board.rows) * board.cols);
  for (int i = 0; i < board.rows; ++i)
    for (int j = 0; j < board.cols; ++j)
      pts.emplace_back(j * board.square_size, i * board.square_size, 0.0);
  return pts;
}

BoardShade board_shade(const BoardSpec& board, double x, double y) {
  if (x < board.min_x() || x >= board.max_x() || y < board.min_y() || y >= board.max_y())
    return BoardShade::Background;
  const int ix = static_cast<int>(std::floor(x / board.square_size));
  const int iy = static_cast<int>(std::floor(y / board.square_size));
  // Margin ring is light.
  if (ix < -1 || ix > board.cols - 1 || iy < -1 || iy > board.rows - 1)
    return BoardShade::Light;
  // Pattern parity: square up-left of the origin corner (ix = iy = -1) is light.
  const int parity = ((ix + iy) % 2 + 2) % 2;
  return parity == 0 ? BoardShade::Light : BoardShade::Dark;
}

}  // namespace evcal
