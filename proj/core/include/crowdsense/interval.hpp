#pragma once

#include <cstdint>

namespace crowdsense {

/// Aligned time bucket: start is always a multiple of length_s, so buckets
/// from independent sensors coincide.
struct Interval {
  std::int64_t start = 0;
  std::int64_t length_s = 300;

  std::int64_t end() const { return start + length_s; }
  bool contains(std::int64_t t) const { return t >= start && t < end(); }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.start == b.start && a.length_s == b.length_s;
  }
  friend auto operator<=>(const Interval& a, const Interval& b) = default;
};

/// Bucket containing timestamp t. length_s must be positive.
Interval bucket_of(std::int64_t t, std::int64_t length_s = 300);

/// Start of the hour containing t.
std::int64_t hour_start(std::int64_t t);

/// Hour of day in [0, 23] for a UTC timestamp.
int hour_of_day(std::int64_t t);

/// Interval lengths must divide one hour so hourly rollups are exact.
bool divides_hour(std::int64_t length_s);

/// "2018-03-23T10:00:00Z" for a UTC timestamp, whole seconds.
struct IsoTime {
  char text[24];
};
IsoTime format_utc(std::int64_t t);

/// Parses the format emitted by format_utc. Throws ParseError.
std::int64_t parse_utc(const char* text);

}  // namespace crowdsense
