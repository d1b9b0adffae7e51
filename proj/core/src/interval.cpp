#include "crowdsense/interval.hpp"

#include <cstdio>
#include <cstring>

#include "crowdsense/errors.hpp"

namespace crowdsense {

namespace {

// Floor division, exact for negative timestamps as well.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Days-from-civil / civil-from-days (Howard Hinnant's algorithms).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

Interval bucket_of(std::int64_t t, std::int64_t length_s) {
  if (length_s <= 0) {
    throw RangeError("interval length must be positive");
  }
  return Interval{floor_div(t, length_s) * length_s, length_s};
}

std::int64_t hour_start(std::int64_t t) { return floor_div(t, 3600) * 3600; }

int hour_of_day(std::int64_t t) {
  std::int64_t h = floor_div(t, 3600) % 24;
  if (h < 0) h += 24;
  return static_cast<int>(h);
}

bool divides_hour(std::int64_t length_s) {
  return length_s > 0 && 3600 % length_s == 0;
}

IsoTime format_utc(std::int64_t t) {
  std::int64_t days = t >= 0 ? t / 86400 : (t - 86399) / 86400;
  std::int64_t sod = t - days * 86400;
  int y, m, d;
  civil_from_days(days, y, m, d);
  IsoTime out;
  std::snprintf(out.text, sizeof(out.text), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60),
                static_cast<int>(sod % 60));
  return out;
}

std::int64_t parse_utc(const char* text) {
  int y, m, d, hh, mm, ss;
  char z = 0;
  if (std::sscanf(text, "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &m, &d, &hh, &mm, &ss, &z) != 7 ||
      z != 'Z' || m < 1 || m > 12 || d < 1 || d > 31 || hh > 23 || mm > 59 || ss > 60) {
    throw ParseError(std::string("bad UTC instant: ") + text);
  }
  return days_from_civil(y, m, d) * 86400 + hh * 3600 + mm * 60 + ss;
}

}  // namespace crowdsense
