#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crowdsense/deployment.hpp"
#include "crowdsense/events.hpp"
#include "crowdsense/geometry.hpp"

namespace crowdsense {

/// One probe reception resolved to the detecting node's position.
struct Sighting {
  std::string node_id;
  Point position;
  int rssi = 0;
  std::int64_t t = 0;
  std::string anon_id;
};

struct PresenceVerdict {
  std::string anon_id;
  Interval epoch;
  bool inside = false;
  int supporting_nodes = 0;

  friend bool operator==(const PresenceVerdict&, const PresenceVerdict&) = default;
};

struct PositionFix {
  std::string anon_id;
  std::int64_t t = 0;
  Point point;
  int n_nodes_used = 0;

  friend bool operator==(const PositionFix&, const PositionFix&) = default;
};

/// Log-distance path-loss model and centroid weight exponent.
struct PathLossParams {
  double p0 = -40.0;  // dBm at 1 m
  double n = 2.0;     // path-loss exponent
  double g = 2.0;     // centroid weight exponent, w = 1/d^g
};

struct PresenceParams {
  int min_nodes = 6;
  int rssi_min = -75;          // dBm floor for a supporting node
  std::int64_t epoch_s = 60;
};

/// Inside/outside for one device in one epoch: the device is inside when at
/// least min_nodes distinct nodes saw it at or above the RSSI floor (judging
/// each node by its strongest sighting in the epoch).
PresenceVerdict detect_presence(std::span<const Sighting> sightings,
                                const std::string& anon_id, const Interval& epoch,
                                const PresenceParams& params = {});

/// d = 10^((p0 - rssi) / (10 n)), meters. Monotone decreasing in rssi.
double rssi_to_distance(double rssi, const PathLossParams& params);

/// Weight-normalized average of detecting node positions, weights 1/d^g with
/// d inferred from each node's strongest RSSI among `sightings`. All
/// sightings must belong to one device. Throws NoSightingsError.
PositionFix weighted_centroid(std::span<const Sighting> sightings,
                              const PathLossParams& params = {});

struct GridSpec {
  Point origin;            // lower-left corner
  double cell_size_m = 1.0;
  int rows = 0;            // y cells
  int cols = 0;            // x cells
};

/// Occupancy histogram of position fixes. Fixes outside the grid accumulate
/// in `overflow` so the cell sum plus overflow always equals the input size.
struct HeatGrid {
  GridSpec spec;
  std::vector<std::int64_t> counts;  // row-major, row 0 = southmost
  std::int64_t overflow = 0;

  std::int64_t& at(int row, int col) { return counts[row * spec.cols + col]; }
  std::int64_t at(int row, int col) const { return counts[row * spec.cols + col]; }
  std::int64_t total() const;
};

HeatGrid heatmap(std::span<const PositionFix> fixes, const GridSpec& spec);

/// Plain-text grid: one row per line, northmost row first.
std::string heatgrid_to_text(const HeatGrid& grid);

/// Grayscale PGM image, one pixel per cell, darkest = busiest.
std::string heatgrid_to_pgm(const HeatGrid& grid);

/// Standalone SVG with one rect per nonzero cell.
std::string heatgrid_to_svg(const HeatGrid& grid);

/// Groups a device's probe events into per-device tumbling fix windows and
/// computes one centroid per window with at least one sighting. Events must
/// reference sniffer nodes of the deployment.
std::vector<PositionFix> locate_stream(std::span<const ProbeEvent> events,
                                       const Deployment& deployment,
                                       const PathLossParams& params = {},
                                       std::int64_t window_s = 10);

/// Presence verdicts for every (device, epoch) with sightings, ordered.
std::vector<PresenceVerdict> presence_stream(std::span<const ProbeEvent> events,
                                             const Deployment& deployment,
                                             const PresenceParams& params = {});

std::string format_verdict(const PresenceVerdict& v);
PresenceVerdict parse_verdict(std::string_view line);
std::string format_fix(const PositionFix& f);
PositionFix parse_fix(std::string_view line);

}  // namespace crowdsense
