#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "evcal/errors.hpp"
#include "evcal/event.hpp"
#include "evcal/event_io.hpp"

using namespace evcal;

TEST_CASE("csv parse normalizes polarity and keeps bounds") {
  std::istringstream in("1000,3,4,1\n1500,3,4,0\n");
  const EventStream s = parse_csv(in, SensorSize{8, 8});
  REQUIRE(s.events.size() == 2);
  CHECK(s.width == 8);
  CHECK(s.events[0].p == 1);
  CHECK(s.events[1].p == -1);
  CHECK(s.events[1].t == 1500);
}

TEST_CASE("csv empty input gives empty stream") {
  std::istringstream in("");
  const EventStream s = parse_csv(in);
  CHECK(s.events.empty());
  CHECK(s.inversion_warnings == 0);
}

TEST_CASE("csv header line is skipped, later garbage is not") {
  std::istringstream ok("t,x,y,p\n5,1,2,1\n");
  CHECK(parse_csv(ok).events.size() == 1);

  std::istringstream bad("5,1,2,1\nnot-a-line\n");
  CHECK_THROWS_AS(parse_csv(bad), MalformedLine);

  std::istringstream bad_line("5,1,2,1\n6,2,3,7\n");
  try {
    parse_csv(bad_line);
    FAIL("expected MalformedLine");
  } catch (const MalformedLine& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("csv out-of-bounds event reports its index") {
  std::istringstream in("1,1,1,1\n2,9,1,1\n");
  try {
    parse_csv(in, SensorSize{4, 4});
    FAIL("expected OutOfBounds");
  } catch (const OutOfBounds& e) {
    CHECK(e.index == 1);
  }
}

TEST_CASE("shuffled timestamps are repaired and counted") {
  std::mt19937_64 rng(7);
  std::vector<Event> original;
  for (int i = 0; i < 100000; ++i)
    original.push_back({std::int64_t(rng() % 1000000), std::uint16_t(rng() % 64),
                        std::uint16_t(rng() % 64), (rng() & 1) ? std::int8_t(1) : std::int8_t(-1)});

  std::size_t expected_warnings = 0;
  for (std::size_t i = 1; i < original.size(); ++i)
    if (original[i].t < original[i - 1].t) ++expected_warnings;

  std::ostringstream text;
  for (const Event& e : original)
    text << e.t << ',' << e.x << ',' << e.y << ',' << int(e.p) << '\n';

  std::istringstream in(text.str());
  const EventStream s = parse_csv(in, SensorSize{64, 64});

  // Independent oracle: stable sort of the raw list.
  std::vector<Event> sorted = original;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  REQUIRE(s.events.size() == sorted.size());
  CHECK(s.events == sorted);
  CHECK(s.inversion_warnings == expected_warnings);
}

TEST_CASE("binary round-trip is bit-exact") {
  std::mt19937_64 rng(11);
  EventStream s;
  s.width = 640;
  s.height = 480;
  for (int i = 0; i < 10000; ++i)
    s.events.push_back({std::int64_t(i) * 3 + std::int64_t(rng() % 3),
                        std::uint16_t(rng() % 640), std::uint16_t(rng() % 480),
                        (rng() & 1) ? std::int8_t(1) : std::int8_t(-1)});

  std::ostringstream out(std::ios::binary);
  write_binary(out, s);
  const std::string bytes = out.str();

  std::istringstream in(bytes, std::ios::binary);
  const EventStream back = parse_binary(in);
  CHECK(back.width == s.width);
  CHECK(back.height == s.height);
  CHECK(back.events == s.events);

  // Serializing again reproduces the same bytes.
  std::ostringstream out2(std::ios::binary);
  write_binary(out2, back);
  CHECK(out2.str() == bytes);
}

TEST_CASE("binary header-only file gives empty stream") {
  EventStream s;
  s.width = 32;
  s.height = 24;
  std::ostringstream out(std::ios::binary);
  write_binary(out, s);
  std::istringstream in(out.str(), std::ios::binary);
  const EventStream back = parse_binary(in);
  CHECK(back.events.empty());
  CHECK(back.width == 32);
}

TEST_CASE("binary bad magic and truncation") {
  std::istringstream junk("NOPE....", std::ios::binary);
  CHECK_THROWS_AS(parse_binary(junk), BadMagic);

  EventStream s;
  s.width = 16;
  s.height = 16;
  for (int i = 0; i < 5; ++i)
    s.events.push_back({i * 10, std::uint16_t(i), std::uint16_t(i), 1});
  std::ostringstream out(std::ios::binary);
  write_binary(out, s);
  const std::string bytes = out.str();

  // Cut inside record 3: header is 16 bytes, each record 13.
  const std::string cut = bytes.substr(0, 16 + 3 * 13 + 5);
  std::istringstream in(cut, std::ios::binary);
  try {
    parse_binary(in);
    FAIL("expected TruncatedRecord");
  } catch (const TruncatedRecord& e) {
    CHECK(e.offset == 16 + 3 * 13);
  }
}

TEST_CASE("fixed-duration slicing boundary behaviour") {
  EventStream s;
  s.width = s.height = 8;
  s.events = {{0, 0, 0, 1}, {49999, 1, 1, 1}, {50000, 2, 2, -1}};
  const auto chunks = slice_fixed_duration(s, 50000, 0);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].events.size() == 2);
  CHECK(chunks[1].events.size() == 1);
  CHECK(chunks[1].events[0].t == 50000);
  CHECK(chunks[0].t_start == 0);
  CHECK(chunks[0].t_end == 50000);
}

TEST_CASE("slicing empty stream and zero window") {
  EventStream s;
  s.width = s.height = 8;
  CHECK(slice_fixed_duration(s, 1000, 0).empty());
  s.events = {{5, 0, 0, 1}};
  CHECK_THROWS_AS(slice_fixed_duration(s, 0, 0), ZeroWindow);
  CHECK_THROWS_AS(slice_at_times(s, {100}, 0), ZeroWindow);
}

TEST_CASE("poisson-like stream slices match a histogram oracle") {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> gap(1e-3);  // mean 1 ms
  EventStream s;
  s.width = s.height = 16;
  double t = 0;
  while (true) {
    t += gap(rng);
    if (t >= 1e6) break;
    s.events.push_back({std::int64_t(t), std::uint16_t(rng() % 16),
                        std::uint16_t(rng() % 16), 1});
  }

  const auto chunks = slice_fixed_duration(s, 50000, 0);
  CHECK(chunks.size() == 20);

  std::map<std::int64_t, std::size_t> histogram;
  for (const Event& e : s.events) ++histogram[e.t / 50000];
  for (std::size_t k = 0; k < chunks.size(); ++k)
    CHECK(chunks[k].events.size() == histogram[std::int64_t(k)]);

  // Partition property: chunks exactly tile the stream.
  std::size_t total = 0;
  for (const auto& c : chunks) {
    for (const Event& e : c.events) {
      CHECK(e.t >= c.t_start);
      CHECK(e.t < c.t_end);
    }
    total += c.events.size();
  }
  CHECK(total == s.events.size());
}

TEST_CASE("centered slicing covers overlapping windows") {
  EventStream s;
  s.width = s.height = 8;
  for (std::int64_t t = 0; t < 100000; t += 1000)
    s.events.push_back({t, 0, 0, 1});

  const auto single = slice_at_times(s, {100000}, 50000);
  REQUIRE(single.size() == 1);
  CHECK(single[0].t_start == 75000);
  CHECK(single[0].t_end == 125000);

  const auto chunks = slice_at_times(s, {40000, 60000}, 50000);
  REQUIRE(chunks.size() == 2);
  // Interval membership oracle.
  for (std::size_t k = 0; k < chunks.size(); ++k) {
    std::size_t expected = 0;
    for (const Event& e : s.events)
      if (e.t >= chunks[k].t_start && e.t < chunks[k].t_end) ++expected;
    CHECK(chunks[k].events.size() == expected);
  }
  // Events in the overlap appear in both chunks.
  std::size_t both = 0;
  for (const Event& e : s.events)
    if (e.t >= 35000 && e.t < 65000) ++both;
  CHECK(both > 0);
  std::size_t in_first = 0, in_second = 0;
  for (const Event& e : chunks[0].events)
    if (e.t >= 35000 && e.t < 65000) ++in_first;
  for (const Event& e : chunks[1].events)
    if (e.t >= 35000 && e.t < 65000) ++in_second;
  CHECK(in_first == both);
  CHECK(in_second == both);

  CHECK(slice_at_times(s, {}, 50000).empty());
}

TEST_CASE("sortedness preserved by slicing on random streams") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    EventStream s;
    s.width = s.height = 8;
    std::int64_t t = 0;
    const int n = 1 + int(rng() % 500);
    for (int i = 0; i < n; ++i) {
      t += rng() % 300;
      s.events.push_back({t, std::uint16_t(rng() % 8), std::uint16_t(rng() % 8), 1});
    }
    const std::int64_t w = 1 + std::int64_t(rng() % 5000);
    const auto chunks = slice_fixed_duration(s, w, 0);
    std::size_t total = 0;
    for (const auto& c : chunks) {
      for (std::size_t i = 1; i < c.events.size(); ++i)
        CHECK(c.events[i].t >= c.events[i - 1].t);
      total += c.events.size();
    }
    CHECK(total == s.events.size());
  }
}
