#include "crowdsense/aggregate.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "crowdsense/errors.hpp"
#include "json_util.hpp"

namespace crowdsense {

IntervalCount count_unique(std::span<const ProbeEvent> events,
                           const std::string& sensor_id, const Interval& interval) {
  std::unordered_set<std::string> ids;
  for (const auto& e : events) {
    if (e.sensor_id == sensor_id && interval.contains(e.t)) {
      ids.insert(e.anon_id);
    }
  }
  return IntervalCount{sensor_id, interval, static_cast<std::int64_t>(ids.size())};
}

HourlyCount hourly_rollup(std::span<const IntervalCount> counts) {
  if (counts.empty()) {
    throw EmptyHourError("no intervals present in hour");
  }
  HourlyCount out;
  out.sensor_id = counts.front().sensor_id;
  out.hour_start = hour_start(counts.front().interval.start);
  double sum = 0.0;
  for (const auto& c : counts) {
    if (c.sensor_id != out.sensor_id || hour_start(c.interval.start) != out.hour_start) {
      throw RangeError("rollup inputs span more than one sensor-hour");
    }
    sum += static_cast<double>(c.unique_devices);
    ++out.intervals_present;
  }
  out.mean_unique = sum / out.intervals_present;
  return out;
}

struct Aggregator::OpenInterval {
  std::string sensor_id;
  Interval interval;
  std::unordered_set<std::string> ids;
};

Aggregator::Aggregator(std::int64_t interval_s)
    : interval_s_(interval_s), watermark_(std::numeric_limits<std::int64_t>::min()) {
  if (!divides_hour(interval_s)) {
    throw ConfigError("interval length must divide 3600");
  }
}

Aggregator::~Aggregator() = default;
Aggregator::Aggregator(Aggregator&&) noexcept = default;
Aggregator& Aggregator::operator=(Aggregator&&) noexcept = default;

void Aggregator::add(const ProbeEvent& event) {
  Interval bucket = bucket_of(event.t, interval_s_);
  if (bucket.start > watermark_) {
    flush_before(bucket.start);
    watermark_ = bucket.start;
  }
  for (auto& open : open_) {
    if (open.sensor_id == event.sensor_id && open.interval == bucket) {
      open.ids.insert(event.anon_id);
      return;
    }
  }
  OpenInterval fresh;
  fresh.sensor_id = event.sensor_id;
  fresh.interval = bucket;
  fresh.ids.insert(event.anon_id);
  open_.push_back(std::move(fresh));
}

void Aggregator::flush_before(std::int64_t t) {
  auto it = open_.begin();
  while (it != open_.end()) {
    if (it->interval.start < t) {
      closed_.push_back(IntervalCount{it->sensor_id, it->interval,
                                      static_cast<std::int64_t>(it->ids.size())});
      it = open_.erase(it);
    } else {
      ++it;
    }
  }
}

std::vector<IntervalCount> Aggregator::finish() {
  flush_before(std::numeric_limits<std::int64_t>::max());
  std::sort(closed_.begin(), closed_.end(),
            [](const IntervalCount& a, const IntervalCount& b) {
              if (a.sensor_id != b.sensor_id) return a.sensor_id < b.sensor_id;
              return a.interval.start < b.interval.start;
            });
  return std::move(closed_);
}

std::vector<HourlyCount> hourly_rollups(std::span<const IntervalCount> counts) {
  std::map<std::pair<std::string, std::int64_t>, std::vector<IntervalCount>> groups;
  for (const auto& c : counts) {
    groups[{c.sensor_id, hour_start(c.interval.start)}].push_back(c);
  }
  std::vector<HourlyCount> out;
  out.reserve(groups.size());
  for (const auto& [key, group] : groups) {
    out.push_back(hourly_rollup(group));
  }
  return out;
}

std::string format_interval_count(const IntervalCount& c) {
  detail::ordered_json j;
  j["sensor"] = c.sensor_id;
  j["start"] = c.interval.start;
  j["len"] = c.interval.length_s;
  j["unique"] = c.unique_devices;
  return j.dump();
}

IntervalCount parse_interval_count(std::string_view line) {
  auto j = detail::parse_json(std::string(line), "interval count");
  IntervalCount c;
  c.sensor_id = j.at("sensor").get<std::string>();
  c.interval.start = j.at("start").get<std::int64_t>();
  c.interval.length_s = j.at("len").get<std::int64_t>();
  c.unique_devices = j.at("unique").get<std::int64_t>();
  if (c.unique_devices < 0) throw RangeError("unique count must be non-negative");
  return c;
}

std::string format_hourly_count(const HourlyCount& c) {
  detail::ordered_json j;
  j["sensor"] = c.sensor_id;
  j["hour"] = c.hour_start;
  j["mean"] = c.mean_unique;
  j["present"] = c.intervals_present;
  return j.dump();
}

HourlyCount parse_hourly_count(std::string_view line) {
  auto j = detail::parse_json(std::string(line), "hourly count");
  HourlyCount c;
  c.sensor_id = j.at("sensor").get<std::string>();
  c.hour_start = j.at("hour").get<std::int64_t>();
  c.mean_unique = j.at("mean").get<double>();
  c.intervals_present = j.at("present").get<int>();
  return c;
}

}  // namespace crowdsense
