#include "crowdsense/analytics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

#include "crowdsense/errors.hpp"
#include "json_util.hpp"

namespace crowdsense {

std::vector<ProbeEvent> dedupe_simultaneous(std::span<const ProbeEvent> events) {
  std::vector<ProbeEvent> sorted(events.begin(), events.end());
  std::sort(sorted.begin(), sorted.end(), [](const ProbeEvent& a, const ProbeEvent& b) {
    if (a.anon_id != b.anon_id) return a.anon_id < b.anon_id;
    if (a.t != b.t) return a.t < b.t;
    if (a.rssi != b.rssi) return a.rssi > b.rssi;  // strongest first
    return a.sensor_id < b.sensor_id;
  });
  std::vector<ProbeEvent> out;
  out.reserve(sorted.size());
  for (auto& e : sorted) {
    if (!out.empty() && out.back().anon_id == e.anon_id && out.back().t == e.t) {
      continue;  // weaker simultaneous sighting
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<FlowRecord> infer_flows(std::span<const ProbeEvent> events,
                                    const Deployment& deployment,
                                    std::int64_t max_gap_s, std::int64_t interval_s) {
  if (max_gap_s <= 0) throw RangeError("max_gap_s must be positive");
  auto deduped = dedupe_simultaneous(events);

  // deduped is grouped by device and time-ordered within each group.
  std::map<std::tuple<std::string, std::string, std::int64_t>, std::int64_t> counts;
  for (std::size_t i = 1; i < deduped.size(); ++i) {
    const ProbeEvent& prev = deduped[i - 1];
    const ProbeEvent& cur = deduped[i];
    if (prev.anon_id != cur.anon_id) continue;
    if (prev.sensor_id == cur.sensor_id) continue;
    if (cur.t - prev.t > max_gap_s) continue;
    Interval arrival = bucket_of(cur.t, interval_s);
    ++counts[{prev.sensor_id, cur.sensor_id, arrival.start}];
  }

  std::vector<FlowRecord> flows;
  flows.reserve(counts.size());
  for (const auto& [key, devices] : counts) {
    const auto& [from, to, start] = key;
    FlowRecord f;
    f.from_sensor = from;
    f.to_sensor = to;
    f.interval = Interval{start, interval_s};
    f.devices = devices;
    f.direction_azimuth =
        azimuth_deg(deployment.node(from).position, deployment.node(to).position);
    flows.push_back(std::move(f));
  }
  std::sort(flows.begin(), flows.end(), [](const FlowRecord& a, const FlowRecord& b) {
    if (a.interval.start != b.interval.start) return a.interval.start < b.interval.start;
    if (a.from_sensor != b.from_sensor) return a.from_sensor < b.from_sensor;
    return a.to_sensor < b.to_sensor;
  });
  return flows;
}

std::vector<Visit> build_visits(std::span<const ProbeEvent> events,
                                std::int64_t gap_tolerance_s) {
  if (gap_tolerance_s <= 0) throw RangeError("gap_tolerance_s must be positive");
  auto deduped = dedupe_simultaneous(events);
  std::vector<Visit> visits;
  for (const auto& e : deduped) {
    if (!visits.empty()) {
      Visit& open = visits.back();
      if (open.anon_id == e.anon_id && open.area_id == e.sensor_id &&
          e.t - open.last_t <= gap_tolerance_s) {
        open.last_t = e.t;
        continue;
      }
    }
    visits.push_back(Visit{e.anon_id, e.sensor_id, e.t, e.t});
  }
  return visits;
}

namespace {

// Sighting times per visit are needed to anchor visits to intervals.
struct VisitWithSightings {
  Visit visit;
  std::vector<std::int64_t> sightings;
};

std::vector<VisitWithSightings> visits_with_sightings(std::span<const ProbeEvent> events,
                                                      const std::string& area_id,
                                                      std::int64_t gap_tolerance_s) {
  auto deduped = dedupe_simultaneous(events);
  std::vector<VisitWithSightings> out;
  for (const auto& e : deduped) {
    if (e.sensor_id != area_id) continue;
    if (!out.empty()) {
      auto& open = out.back();
      if (open.visit.anon_id == e.anon_id && e.t - open.visit.last_t <= gap_tolerance_s) {
        open.visit.last_t = e.t;
        open.sightings.push_back(e.t);
        continue;
      }
    }
    VisitWithSightings v;
    v.visit = Visit{e.anon_id, e.sensor_id, e.t, e.t};
    v.sightings.push_back(e.t);
    out.push_back(std::move(v));
  }
  return out;
}

bool touches_interval(const VisitWithSightings& v, const Interval& interval) {
  return std::any_of(v.sightings.begin(), v.sightings.end(),
                     [&](std::int64_t t) { return interval.contains(t); });
}

}  // namespace

StayStats stay_stats(std::span<const ProbeEvent> events, const std::string& area_id,
                     const Interval& interval, std::int64_t gap_tolerance_s,
                     std::int64_t waiting_threshold_s) {
  if (waiting_threshold_s <= 0) throw RangeError("waiting_threshold_s must be positive");
  auto visits = visits_with_sightings(events, area_id, gap_tolerance_s);
  StayStats out;
  out.area_id = area_id;
  out.interval = interval;
  double dwell_sum = 0.0;
  std::int64_t n = 0;
  for (const auto& v : visits) {
    if (!touches_interval(v, interval)) continue;
    dwell_sum += static_cast<double>(v.visit.dwell_s());
    ++n;
    if (v.visit.dwell_s() >= waiting_threshold_s) ++out.waiting_devices;
  }
  out.mean_dwell_s = n > 0 ? dwell_sum / static_cast<double>(n) : 0.0;
  return out;
}

std::vector<StayStats> stay_series(std::span<const ProbeEvent> events,
                                   const std::string& area_id, std::int64_t interval_s,
                                   std::int64_t gap_tolerance_s,
                                   std::int64_t waiting_threshold_s) {
  if (waiting_threshold_s <= 0) throw RangeError("waiting_threshold_s must be positive");
  auto visits = visits_with_sightings(events, area_id, gap_tolerance_s);

  struct Cell {
    double dwell_sum = 0.0;
    std::int64_t visits = 0;
    std::int64_t waiting = 0;
  };
  std::map<std::int64_t, Cell> cells;
  for (const auto& v : visits) {
    // Each visit contributes once to every interval holding a sighting.
    std::int64_t last_bucket = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t t : v.sightings) {
      std::int64_t bucket = bucket_of(t, interval_s).start;
      if (bucket == last_bucket) continue;
      last_bucket = bucket;
      Cell& cell = cells[bucket];
      cell.dwell_sum += static_cast<double>(v.visit.dwell_s());
      ++cell.visits;
      if (v.visit.dwell_s() >= waiting_threshold_s) ++cell.waiting;
    }
  }

  std::vector<StayStats> out;
  out.reserve(cells.size());
  for (const auto& [start, cell] : cells) {
    StayStats s;
    s.area_id = area_id;
    s.interval = Interval{start, interval_s};
    s.mean_dwell_s = cell.visits > 0 ? cell.dwell_sum / cell.visits : 0.0;
    s.waiting_devices = cell.waiting;
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_flow(const FlowRecord& f) {
  detail::ordered_json j;
  j["from"] = f.from_sensor;
  j["to"] = f.to_sensor;
  j["start"] = f.interval.start;
  j["len"] = f.interval.length_s;
  j["devices"] = f.devices;
  j["azimuth"] = f.direction_azimuth;
  return j.dump();
}

FlowRecord parse_flow(std::string_view line) {
  auto j = detail::parse_json(std::string(line), "flow record");
  FlowRecord f;
  f.from_sensor = j.at("from").get<std::string>();
  f.to_sensor = j.at("to").get<std::string>();
  f.interval.start = j.at("start").get<std::int64_t>();
  f.interval.length_s = j.at("len").get<std::int64_t>();
  f.devices = j.at("devices").get<std::int64_t>();
  f.direction_azimuth = j.at("azimuth").get<double>();
  if (f.from_sensor == f.to_sensor) throw RangeError("flow endpoints must differ");
  if (f.devices < 0) throw RangeError("flow devices must be non-negative");
  return f;
}

std::string format_stay(const StayStats& s) {
  detail::ordered_json j;
  j["area"] = s.area_id;
  j["start"] = s.interval.start;
  j["len"] = s.interval.length_s;
  j["mean_dwell_s"] = s.mean_dwell_s;
  j["waiting"] = s.waiting_devices;
  return j.dump();
}

StayStats parse_stay(std::string_view line) {
  auto j = detail::parse_json(std::string(line), "stay stats");
  StayStats s;
  s.area_id = j.at("area").get<std::string>();
  s.interval.start = j.at("start").get<std::int64_t>();
  s.interval.length_s = j.at("len").get<std::int64_t>();
  s.mean_dwell_s = j.at("mean_dwell_s").get<double>();
  s.waiting_devices = j.at("waiting").get<std::int64_t>();
  if (s.mean_dwell_s < 0) throw RangeError("mean dwell must be non-negative");
  return s;
}

}  // namespace crowdsense
