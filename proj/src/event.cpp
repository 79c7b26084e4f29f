#include "evcal/event.hpp"

#include <algorithm>

#include "evcal/errors.hpp"

namespace evcal {

std::size_t sort_events(std::vector<Event>& events) {
  std::size_t inversions = 0;
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].t < events[i - 1].t) ++inversions;
  }
  if (inversions > 0) {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
  }
  return inversions;
}

namespace {

// First index with t >= bound, assuming sorted events.
std::size_t lower_index(const std::vector<Event>& ev, std::int64_t bound) {
  auto it = std::lower_bound(ev.begin(), ev.end(), bound,
                             [](const Event& e, std::int64_t b) { return e.t < b; });
  return static_cast<std::size_t>(it - ev.begin());
}

}  // namespace

std::vector<Chunk> slice_fixed_duration(const EventStream& stream,
                                        std::int64_t window_us,
                                        std::int64_t t0) {
  if (window_us <= 0) throw ZeroWindow();
  std::vector<Chunk> chunks;
  if (stream.events.empty()) return chunks;

  const std::int64_t t_last = stream.events.back().t;
  const std::int64_t n = (t_last - t0) / window_us + 1;
  chunks.reserve(static_cast<std::size_t>(n));

  std::size_t begin = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t start = t0 + k * window_us;
    const std::int64_t end = start + window_us;
    std::size_t stop = begin;
    while (stop < stream.events.size() && stream.events[stop].t < end) ++stop;
    chunks.push_back({start, end,
                      std::span<const Event>(stream.events.data() + begin, stop - begin)});
    begin = stop;
  }
  return chunks;
}

std::vector<Chunk> slice_at_times(const EventStream& stream,
                                  const std::vector<std::int64_t>& centers,
                                  std::int64_t window_us) {
  if (window_us <= 0) throw ZeroWindow();
  std::vector<Chunk> chunks;
  chunks.reserve(centers.size());
  for (std::int64_t c : centers) {
    const std::int64_t start = c - window_us / 2;
    const std::int64_t end = start + window_us;
    const std::size_t lo = lower_index(stream.events, start);
    const std::size_t hi = lower_index(stream.events, end);
    chunks.push_back({start, end,
                      std::span<const Event>(stream.events.data() + lo, hi - lo)});
  }
  return chunks;
}

}  // namespace evcal
