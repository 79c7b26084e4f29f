#ifndef EVCAL_EVENT_IO_HPP
#define EVCAL_EVENT_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "evcal/event.hpp"

namespace evcal {

struct SensorSize {
  int width = 0;
  int height = 0;
};

// CSV lines `t_us,x,y,p` with p in {0,1} or {-1,1}; 0 is normalized to -1.
// An optional header line is skipped. Out-of-order timestamps are repaired
// by a stable sort and counted in inversion_warnings. If sensor_size is
// absent it is inferred as (max_x + 1, max_y + 1).
EventStream parse_csv(std::istream& in, std::optional<SensorSize> sensor_size = {});

void write_csv(std::ostream& out, const EventStream& stream);

// EVT1 binary layout, little-endian:
//   magic "EVT1", u16 width, u16 height, u64 count,
//   count * { u64 t_us, u16 x, u16 y, i8 p } with p in {-1,+1}.
// Round-trips bit-exactly with write_binary.
EventStream parse_binary(std::istream& in);

void write_binary(std::ostream& out, const EventStream& stream);

// Dispatches on the EVT1 magic, falling back to CSV.
EventStream read_events(const std::string& path, std::optional<SensorSize> sensor_size = {});

void write_events(const std::string& path, const EventStream& stream);  // by extension

}  // namespace evcal

#endif
