#include "evcal/recon.hpp"

#include <algorithm>
#include <cmath>

#include "evcal/errors.hpp"
#include "evcal/image_io.hpp"

namespace evcal {

void integrate_chunk(ReconState& state, const Chunk& chunk, double contrast) {
  for (const Event& e : chunk.events)
    state.log_intensity(e.y, e.x) += contrast * e.p;
  state.current_time_us = chunk.t_end;
}

void leaky_integrate_chunk(ReconState& state, const Chunk& chunk, double contrast,
                           double decay_tau_us) {
  if (decay_tau_us <= 0) throw ConfigError("decay_tau_us must be positive");
  if (state.current_time_us < 0) {
    state.current_time_us = chunk.t_start;
    state.last_update_us.setConstant(chunk.t_start);
  }
  for (const Event& e : chunk.events) {
    const std::int64_t prev = std::max(state.last_update_us(e.y, e.x),
                                       state.current_time_us);
    const double dt = static_cast<double>(e.t - prev);
    double v = state.log_intensity(e.y, e.x);
    if (dt > 0) v *= std::exp(-dt / decay_tau_us);
    state.log_intensity(e.y, e.x) = v + contrast * e.p;
    state.last_update_us(e.y, e.x) = e.t;
  }
  // Advance every pixel to the chunk end.
  for (Eigen::Index y = 0; y < state.log_intensity.rows(); ++y) {
    for (Eigen::Index x = 0; x < state.log_intensity.cols(); ++x) {
      const std::int64_t prev = std::max(state.last_update_us(y, x),
                                         state.current_time_us);
      const double dt = static_cast<double>(chunk.t_end - prev);
      if (dt > 0) state.log_intensity(y, x) *= std::exp(-dt / decay_tau_us);
      state.last_update_us(y, x) = chunk.t_end;
    }
  }
  state.current_time_us = chunk.t_end;
}

namespace {

double percentile(std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double idx = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

Frame tonemap(const ReconState& state, std::int64_t timestamp, FrameSource source) {
  const int w = state.width(), h = state.height();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double v = state.log_intensity(y, x);
      if (std::isfinite(v)) values.push_back(v);
    }

  Frame frame;
  frame.timestamp = timestamp;
  frame.source = source;
  frame.pixels = Image8(h, w);

  if (values.empty()) {
    frame.pixels.setConstant(128);
    return frame;
  }
  std::sort(values.begin(), values.end());
  const double lo = percentile(values, 0.02);
  const double hi = percentile(values, 0.98);
  if (hi - lo < 1e-12) {
    frame.pixels.setConstant(128);
    return frame;
  }
  const double scale = 255.0 / (hi - lo);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = (state.log_intensity(y, x) - lo) * scale;
      frame.pixels(y, x) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
  return frame;
}

std::vector<Frame> import_frames(const std::vector<std::string>& image_paths,
                                 const std::vector<std::int64_t>& timestamps) {
  if (image_paths.size() != timestamps.size()) throw CountMismatch();
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    if (timestamps[i] <= timestamps[i - 1])
      throw Error("timestamps must be strictly increasing");

  std::vector<Frame> frames;
  frames.reserve(image_paths.size());
  for (std::size_t i = 0; i < image_paths.size(); ++i) {
    Frame f;
    f.timestamp = timestamps[i];
    f.pixels = read_image(image_paths[i]);
    f.source = FrameSource::Imported;
    if (!frames.empty() && (f.width() != frames.front().width() ||
                            f.height() != frames.front().height()))
      throw MixedResolutions();
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace evcal
