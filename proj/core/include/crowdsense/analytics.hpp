#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crowdsense/deployment.hpp"
#include "crowdsense/events.hpp"

namespace crowdsense {

/// Devices that moved from one sensing area to another, bucketed by arrival
/// time at the destination sensor.
struct FlowRecord {
  std::string from_sensor;
  std::string to_sensor;
  Interval interval;
  std::int64_t devices = 0;
  double direction_azimuth = 0.0;  // degrees [0, 360), from -> to

  friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

/// Dwell statistics for one area and interval. waiting_devices counts visits
/// at or above the waiting threshold.
struct StayStats {
  std::string area_id;
  Interval interval;
  double mean_dwell_s = 0.0;
  std::int64_t waiting_devices = 0;

  friend bool operator==(const StayStats&, const StayStats&) = default;
};

/// A maximal run of sightings of one device in one area with inter-sighting
/// gaps no larger than the tolerance.
struct Visit {
  std::string anon_id;
  std::string area_id;
  std::int64_t first_t = 0;
  std::int64_t last_t = 0;

  std::int64_t dwell_s() const { return last_t - first_t; }
};

/// Collapses simultaneous sightings: when one device is seen by several
/// sensors in the same second, the strongest RSSI wins (sensor id breaks
/// ties) so replays are deterministic. Input must be time-ordered; output is
/// ordered by (anon_id, t).
std::vector<ProbeEvent> dedupe_simultaneous(std::span<const ProbeEvent> events);

/// Per-device transitions between different sensors with a time gap of at
/// most max_gap_s, aggregated per (from, to, arrival interval).
/// Records are ordered by (interval, from, to).
std::vector<FlowRecord> infer_flows(std::span<const ProbeEvent> events,
                                    const Deployment& deployment,
                                    std::int64_t max_gap_s = 300,
                                    std::int64_t interval_s = 300);

/// Gap-tolerant visits of every device in every area.
std::vector<Visit> build_visits(std::span<const ProbeEvent> events,
                                std::int64_t gap_tolerance_s = 120);

/// Stay statistics for one area and one interval. A visit contributes when
/// at least one of its sightings falls inside the interval (which keeps
/// waiting_devices bounded by the interval's unique device count).
StayStats stay_stats(std::span<const ProbeEvent> events, const std::string& area_id,
                     const Interval& interval, std::int64_t gap_tolerance_s = 120,
                     std::int64_t waiting_threshold_s = 300);

/// Stay statistics for every interval of one area that has sightings,
/// ordered by interval start.
std::vector<StayStats> stay_series(std::span<const ProbeEvent> events,
                                   const std::string& area_id,
                                   std::int64_t interval_s = 300,
                                   std::int64_t gap_tolerance_s = 120,
                                   std::int64_t waiting_threshold_s = 300);

std::string format_flow(const FlowRecord& f);
FlowRecord parse_flow(std::string_view line);
std::string format_stay(const StayStats& s);
StayStats parse_stay(std::string_view line);

}  // namespace crowdsense
