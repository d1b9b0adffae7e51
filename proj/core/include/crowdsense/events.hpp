#pragma once

#include <cstdint>
#include <string>

#include "crowdsense/interval.hpp"

namespace crowdsense {

/// One anonymized Wi-Fi probe sighting.
struct ProbeEvent {
  std::string sensor_id;
  std::string anon_id;  // 64 lowercase hex chars
  std::int64_t t = 0;   // UTC seconds
  int rssi = 0;         // dBm, [-100, 0]
  int seq = 0;          // 802.11 sequence number, [0, 4095]

  friend bool operator==(const ProbeEvent&, const ProbeEvent&) = default;
};

/// Probe sighting carrying the raw MAC. Accepted only by the anonymization
/// filter and emitted only by the simulator; never enters analytics.
struct RawProbeEvent {
  std::string sensor_id;
  std::string mac;
  std::int64_t t = 0;
  int rssi = 0;
  int seq = 0;

  friend bool operator==(const RawProbeEvent&, const RawProbeEvent&) = default;
};

/// Count-in/count-out totals from a stereoscopic camera, pre-bucketed
/// on-device per interval.
struct CameraTick {
  std::string camera_id;
  Interval interval;
  std::int64_t count_in = 0;
  std::int64_t count_out = 0;

  friend bool operator==(const CameraTick&, const CameraTick&) = default;
};

}  // namespace crowdsense
