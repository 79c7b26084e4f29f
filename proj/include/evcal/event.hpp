#ifndef EVCAL_EVENT_HPP
#define EVCAL_EVENT_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace evcal {

// Single brightness-change record. Timestamps are integer microseconds,
// polarity is strictly -1 or +1 (file formats using {0,1} are normalized
// on load).
struct Event {
  std::int64_t t = 0;  // microseconds, non-negative
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::int8_t p = 1;  // -1 or +1

  friend bool operator==(const Event&, const Event&) = default;
};

// Immutable after load. Events sorted non-decreasing in t; ties keep the
// order they had in the source.
struct EventStream {
  int width = 0;
  int height = 0;
  std::vector<Event> events;
  // Number of consecutive timestamp decreases seen in the source before
  // the stream was sorted. Zero for well-formed input.
  std::size_t inversion_warnings = 0;
};

// Half-open time window [t_start, t_end) viewing a contiguous run of an
// EventStream. Never owns the events.
struct Chunk {
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;
  std::span<const Event> events;
};

// Stable-sorts by timestamp and counts inversions present in the incoming
// order. Used by every loader.
std::size_t sort_events(std::vector<Event>& events);

// Contiguous windows [t0 + k*w, t0 + (k+1)*w) covering every event.
// Empty chunks are emitted so that chunk index k maps affinely to time.
// Throws ZeroWindow; requires t0 <= first event time.
std::vector<Chunk> slice_fixed_duration(const EventStream& stream,
                                        std::int64_t window_us,
                                        std::int64_t t0);

// One chunk per center c, covering [c - w/2, c + w/2). Chunks may overlap;
// centers must be sorted ascending. Throws ZeroWindow.
std::vector<Chunk> slice_at_times(const EventStream& stream,
                                  const std::vector<std::int64_t>& centers,
                                  std::int64_t window_us);

}  // namespace evcal

#endif
