#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crowdsense/events.hpp"
#include "crowdsense/interval.hpp"

namespace crowdsense {

/// Distinct devices seen by one sensor in one interval.
struct IntervalCount {
  std::string sensor_id;
  Interval interval;
  std::int64_t unique_devices = 0;

  friend bool operator==(const IntervalCount&, const IntervalCount&) = default;
};

/// Mean of the per-interval unique counts over one hour. Missing intervals
/// are excluded from the mean and reflected in intervals_present.
struct HourlyCount {
  std::string sensor_id;
  std::int64_t hour_start = 0;
  double mean_unique = 0.0;
  int intervals_present = 0;

  friend bool operator==(const HourlyCount&, const HourlyCount&) = default;
};

/// Cardinality of the distinct anon_id set among `events` matching the
/// sensor and interval. Devices are deduplicated by anon_id alone; repeated
/// frames and sequence numbers do not inflate the count.
IntervalCount count_unique(std::span<const ProbeEvent> events,
                           const std::string& sensor_id, const Interval& interval);

/// Throws EmptyHourError when `counts` is empty. All counts must belong to
/// the same sensor and hour.
HourlyCount hourly_rollup(std::span<const IntervalCount> counts);

/// Streaming per-sensor unique counting over a time-ordered event feed.
/// Distinct-id sets live only while their interval is open; they are flushed
/// as soon as the feed moves past the interval, keeping memory bounded.
class Aggregator {
 public:
  explicit Aggregator(std::int64_t interval_s = 300);
  ~Aggregator();
  Aggregator(Aggregator&&) noexcept;
  Aggregator& operator=(Aggregator&&) noexcept;

  void add(const ProbeEvent& event);

  /// Flushes open intervals and returns every count, ordered by
  /// (sensor, interval start). May be called once.
  std::vector<IntervalCount> finish();

  std::int64_t interval_s() const { return interval_s_; }

 private:
  struct OpenInterval;
  std::int64_t interval_s_;
  std::vector<IntervalCount> closed_;
  std::vector<OpenInterval> open_;
  std::int64_t watermark_;

  void flush_before(std::int64_t t);
};

/// Hourly rollups for every (sensor, hour) present, ordered.
std::vector<HourlyCount> hourly_rollups(std::span<const IntervalCount> counts);

std::string format_interval_count(const IntervalCount& c);
IntervalCount parse_interval_count(std::string_view line);
std::string format_hourly_count(const HourlyCount& c);
HourlyCount parse_hourly_count(std::string_view line);

}  // namespace crowdsense
