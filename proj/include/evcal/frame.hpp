#ifndef EVCAL_FRAME_HPP
#define EVCAL_FRAME_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace evcal {

using Image8 = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using ImageD = Eigen::ArrayXXd;

enum class FrameSource { Integrated, Leaky, Imported, Rendered };

// Detector-ready grayscale frame. pixels(y, x); timestamp is the
// reconstruction reference time (chunk end, or requested center time).
struct Frame {
  std::int64_t timestamp = 0;
  Image8 pixels;
  FrameSource source = FrameSource::Integrated;

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
};

}  // namespace evcal

#endif
