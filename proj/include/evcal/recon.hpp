#ifndef EVCAL_RECON_HPP
#define EVCAL_RECON_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "evcal/event.hpp"
#include "evcal/frame.hpp"

namespace evcal {

// Running per-pixel estimate of the log-intensity change since the state
// was (re)initialized. Single writer; tonemap snapshots are pure.
struct ReconState {
  ImageD log_intensity;
  Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> last_update_us;
  std::int64_t current_time_us = -1;  // -1 until the first chunk

  ReconState() = default;
  ReconState(int width, int height)
      : log_intensity(ImageD::Zero(height, width)),
        last_update_us(
            Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(height,
                                                                             width)) {}

  int width() const { return static_cast<int>(log_intensity.cols()); }
  int height() const { return static_cast<int>(log_intensity.rows()); }
};

// Direct inversion of the event generative model: adds contrast * polarity
// per event. Order-independent within a pixel.
void integrate_chunk(ReconState& state, const Chunk& chunk, double contrast);

// Same increment rule, but pixel values decay by exp(-dt/tau) between
// updates; the whole state is advanced to the chunk end. Keeps long real
// sequences from drifting.
void leaky_integrate_chunk(ReconState& state, const Chunk& chunk, double contrast,
                           double decay_tau_us);

// Robust-range normalization: [p2, p98] percentiles map to [0, 255], the
// rest clamps. A constant state maps to uniform 128.
Frame tonemap(const ReconState& state, std::int64_t timestamp,
              FrameSource source = FrameSource::Integrated);

// Externally reconstructed frames entering the same back end. Timestamps
// must be strictly increasing and match the image count; all images must
// share one resolution. Color inputs are converted by luma.
std::vector<Frame> import_frames(const std::vector<std::string>& image_paths,
                                 const std::vector<std::int64_t>& timestamps);

}  // namespace evcal

#endif
