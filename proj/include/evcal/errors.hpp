#ifndef EVCAL_ERRORS_HPP
#define EVCAL_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evcal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- event stream parsing ----

struct MalformedLine : Error {
  explicit MalformedLine(std::size_t line_no, const std::string& what = "")
      : Error("malformed line " + std::to_string(line_no) +
              (what.empty() ? "" : ": " + what)),
        line(line_no) {}
  std::size_t line;
};

struct OutOfBounds : Error {
  explicit OutOfBounds(std::size_t event_index)
      : Error("event " + std::to_string(event_index) + " outside sensor bounds"),
        index(event_index) {}
  std::size_t index;
};

struct BadMagic : Error {
  BadMagic() : Error("bad magic, not an EVT1 file") {}
};

struct TruncatedRecord : Error {
  explicit TruncatedRecord(std::uint64_t byte_offset)
      : Error("truncated record at byte " + std::to_string(byte_offset)),
        offset(byte_offset) {}
  std::uint64_t offset;
};

// ---- slicing ----

struct ZeroWindow : Error {
  ZeroWindow() : Error("window duration must be positive") {}
};

// ---- simulation ----

struct DegeneratePose : Error {
  explicit DegeneratePose(std::int64_t t = -1)
      : Error(t >= 0 ? "degenerate pose at t=" + std::to_string(t) + "us"
                     : "degenerate pose"),
        t_us(t) {}
  std::int64_t t_us;
};

struct OutOfRange : Error {
  using Error::Error;
};

// ---- frame import ----

struct MixedResolutions : Error {
  MixedResolutions() : Error("imported images have mixed resolutions") {}
};

struct CountMismatch : Error {
  CountMismatch() : Error("image count does not match timestamp count") {}
};

struct UnreadableImage : Error {
  explicit UnreadableImage(const std::string& p)
      : Error("cannot read image: " + p), path(p) {}
  std::string path;
};

// ---- detection / metrics ----

struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero") {}
};

// ---- calibration ----

struct DegenerateConfiguration : Error {
  using Error::Error;
  DegenerateConfiguration() : Error("degenerate point configuration") {}
};

struct IllConditioned : Error {
  explicit IllConditioned(double cond)
      : Error("linear system ill-conditioned (cond=" + std::to_string(cond) + ")"),
        condition(cond) {}
  double condition;
};

struct RankDeficient : Error {
  RankDeficient() : Error("fewer observations than parameters") {}
};

struct MissingPose : Error {
  explicit MissingPose(std::size_t view)
      : Error("no pose for view " + std::to_string(view)), view_index(view) {}
  std::size_t view_index;
};

struct NoCovisibility : Error {
  NoCovisibility() : Error("no co-visible view pair between cameras") {}
};

struct ModelMismatch : Error {
  using Error::Error;
  ModelMismatch() : Error("camera model tags do not match") {}
};

// ---- configuration ----

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace evcal

#endif
