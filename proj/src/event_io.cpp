#include "evcal/event_io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "evcal/errors.hpp"

namespace evcal {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'V', 'T', '1'};

void check_bounds(EventStream& s) {
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const Event& e = s.events[i];
    if (e.x >= s.width || e.y >= s.height) throw OutOfBounds(i);
  }
}

bool parse_int(std::string_view field, std::int64_t& value) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

template <typename T>
void put_le(std::ostream& out, T v) {
  std::array<char, sizeof(T)> buf;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <typename T>
bool get_le(std::istream& in, T& v) {
  std::array<char, sizeof(T)> buf;
  in.read(buf.data(), buf.size());
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) return false;
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    u |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  v = static_cast<T>(u);
  return true;
}

}  // namespace

EventStream parse_csv(std::istream& in, std::optional<SensorSize> sensor_size) {
  EventStream stream;
  std::string line;
  std::size_t line_no = 0;
  bool first_data_line = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::array<std::int64_t, 4> f{};
    std::size_t field = 0;
    std::size_t start = 0;
    bool ok = true;
    for (std::size_t i = 0; i <= line.size() && ok; ++i) {
      if (i == line.size() || line[i] == ',') {
        if (field >= 4) {
          ok = false;
          break;
        }
        ok = parse_int(std::string_view(line).substr(start, i - start), f[field]);
        ++field;
        start = i + 1;
      }
    }
    ok = ok && field == 4;

    if (!ok) {
      // A single leading non-numeric line is treated as a header.
      if (first_data_line) {
        first_data_line = false;
        continue;
      }
      throw MalformedLine(line_no, line);
    }
    first_data_line = false;

    if (f[0] < 0 || f[1] < 0 || f[2] < 0 ||
        f[1] > std::numeric_limits<std::uint16_t>::max() ||
        f[2] > std::numeric_limits<std::uint16_t>::max())
      throw MalformedLine(line_no, line);
    if (f[3] != 0 && f[3] != 1 && f[3] != -1) throw MalformedLine(line_no, line);

    Event e;
    e.t = f[0];
    e.x = static_cast<std::uint16_t>(f[1]);
    e.y = static_cast<std::uint16_t>(f[2]);
    e.p = (f[3] > 0) ? std::int8_t{1} : std::int8_t{-1};
    stream.events.push_back(e);
  }

  if (sensor_size) {
    stream.width = sensor_size->width;
    stream.height = sensor_size->height;
  } else {
    for (const Event& e : stream.events) {
      stream.width = std::max(stream.width, int(e.x) + 1);
      stream.height = std::max(stream.height, int(e.y) + 1);
    }
  }
  check_bounds(stream);
  stream.inversion_warnings = sort_events(stream.events);
  return stream;
}

void write_csv(std::ostream& out, const EventStream& stream) {
  for (const Event& e : stream.events)
    out << e.t << ',' << e.x << ',' << e.y << ',' << int(e.p) << '\n';
}

EventStream parse_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() != 4 || magic != kMagic) throw BadMagic();

  EventStream stream;
  std::uint16_t w = 0, h = 0;
  std::uint64_t count = 0;
  if (!get_le(in, w) || !get_le(in, h) || !get_le(in, count))
    throw TruncatedRecord(4);
  stream.width = w;
  stream.height = h;

  constexpr std::uint64_t kHeader = 4 + 2 + 2 + 8;
  constexpr std::uint64_t kRecord = 8 + 2 + 2 + 1;
  stream.events.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t t = 0;
    std::uint16_t x = 0, y = 0;
    std::int8_t p = 0;
    if (!get_le(in, t) || !get_le(in, x) || !get_le(in, y) || !get_le(in, p))
      throw TruncatedRecord(kHeader + i * kRecord);
    if (p != 1 && p != -1) throw TruncatedRecord(kHeader + i * kRecord);
    stream.events.push_back({static_cast<std::int64_t>(t), x, y, p});
  }
  check_bounds(stream);
  stream.inversion_warnings = sort_events(stream.events);
  return stream;
}

void write_binary(std::ostream& out, const EventStream& stream) {
  out.write(kMagic.data(), 4);
  put_le(out, static_cast<std::uint16_t>(stream.width));
  put_le(out, static_cast<std::uint16_t>(stream.height));
  put_le(out, static_cast<std::uint64_t>(stream.events.size()));
  for (const Event& e : stream.events) {
    put_le(out, static_cast<std::uint64_t>(e.t));
    put_le(out, e.x);
    put_le(out, e.y);
    put_le(out, e.p);
  }
}

EventStream read_events(const std::string& path, std::optional<SensorSize> sensor_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  const bool binary = (in.gcount() == 4 && magic == kMagic);
  in.clear();
  in.seekg(0);
  return binary ? parse_binary(in) : parse_csv(in, sensor_size);
}

void write_events(const std::string& path, const EventStream& stream) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    write_csv(out, stream);
  else
    write_binary(out, stream);
}

}  // namespace evcal
