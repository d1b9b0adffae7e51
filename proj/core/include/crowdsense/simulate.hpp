#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crowdsense/deployment.hpp"
#include "crowdsense/events.hpp"
#include "crowdsense/geometry.hpp"

namespace crowdsense {

/// Arrivals per hour by hour of day.
using DiurnalRate = std::array<double, 24>;

/// A waypoint where pedestrians dwell. In outdoor scenarios places coincide
/// with sniffer sensing areas; indoors they are interior spots.
struct PlaceSpec {
  std::string id;
  Point position;
  double radius_m = 20.0;  // circular footprint for ground-truth presence
  double dwell_mean_s = 240.0;
  DiurnalRate arrivals_per_hour{};
  std::vector<std::string> neighbors;  // walkable next places
  std::string cluster_id;
};

/// A pass-through path (e.g. the street outside a building). Walkers follow
/// it end to end without dwelling.
struct RouteSpec {
  std::string id;
  std::vector<Point> path;
  DiurnalRate arrivals_per_hour{};
};

/// Building walls attenuate radio paths crossing them.
struct WallSpec {
  Rectangle rect;
  double loss_db = 12.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::int64_t start_t = 0;  // aligned to interval_s
  std::int64_t duration_s = 86400;

  Deployment deployment;
  std::vector<PlaceSpec> places;
  std::vector<RouteSpec> routes;
  /// Doors pedestrians use to enter/leave. Empty: spawn points are placed
  /// radially spawn_offset_m away from the first/last place.
  std::vector<Point> entry_points;

  double device_ownership_prob = 0.75;
  double probe_interval_mean_s = 30.0;

  // True radio model (what the air does, not what locate assumes).
  double p0 = -40.0;
  double path_loss_n = 2.0;
  double sigma_db = 3.0;
  double detection_range_m = 25.0;
  std::vector<WallSpec> walls;

  // Camera behaviour; accuracy is drawn uniformly from the range once per
  // scenario (set both ends equal to pin it).
  double camera_accuracy_min = 0.93;
  double camera_accuracy_max = 0.93;
  double camera_double_count_rate = 0.0;

  double walking_speed_mps = 1.4;
  double continue_prob = 0.6;  // chance of walking on to a neighbor after a dwell
  int max_places_per_trip = 8;
  double min_dwell_s = 5.0;
  double spawn_offset_m = 30.0;

  std::int64_t interval_s = 300;
  std::int64_t epoch_s = 60;
  std::int64_t session_period_s = 86400;

  /// Region used for inside/outside ground-truth labels (indoor pilots).
  std::optional<Rectangle> building;

  static ScenarioConfig from_json(const std::string& text);
  std::string to_json() const;

  /// Structural checks (probabilities in range, places resolvable, choke
  /// points backed by places, ...). Throws ConfigError.
  void validate() const;
};

/// Piecewise-linear trajectory knot.
struct TrajectoryPoint {
  double t = 0.0;
  Point pos;
};

struct PedestrianTruth {
  std::uint64_t id = 0;
  bool has_device = false;
  std::string mac;                    // set only when has_device
  std::vector<std::string> anon_ids;  // one per session overlapping the trip
  std::uint64_t first_session = 0;
  std::vector<TrajectoryPoint> waypoints;

  double born_t() const { return waypoints.front().t; }
  double gone_t() const { return waypoints.back().t; }
};

/// Position at time t (clamped to the trajectory's span).
Point truth_position(const PedestrianTruth& ped, double t);

struct TransitTruth {
  std::string from;
  std::string to;
  std::int64_t t = 0;  // arrival at destination footprint
  std::uint64_t ped = 0;
  bool has_device = false;
};

struct AreaCountTruth {
  std::string area_id;
  Interval interval;
  std::int64_t people = 0;
};

struct PresenceTruth {
  std::string anon_id;
  std::int64_t epoch_start = 0;
  bool inside = false;
};

struct GroundTruth {
  std::vector<AreaCountTruth> area_counts;  // ordered (area, interval)
  std::vector<TransitTruth> transits;
  std::vector<PedestrianTruth> pedestrians;
  std::vector<PresenceTruth> presence;  // only when a building is configured
  double camera_accuracy_used = 0.0;
  std::int64_t true_crossings = 0;  // all boundary crossings at camera places

  std::string to_json() const;
};

/// Device digest -> pedestrian index, for joining analytics output back to
/// ground truth in evaluations.
std::map<std::string, std::size_t> anon_index(const GroundTruth& truth);

struct SimOutput {
  std::vector<RawProbeEvent> raw_probes;  // time-ordered
  std::vector<ProbeEvent> probes;         // same sightings, anonymized
  std::vector<CameraTick> camera_ticks;   // ordered (camera, interval)
  GroundTruth truth;
};

/// Runs the scenario. Identical configs give bit-identical outputs; every
/// random decision comes from a documented substream of config.seed.
SimOutput generate(const ScenarioConfig& config);

/// Built-in pilot-shaped scenarios: "goldcoast" (17 sniffers, 2 cameras,
/// heavy/light clusters) and "santander" (8 perimeter nodes on a 40 m x 20 m
/// indoor plan). Throws UnknownPresetError.
ScenarioConfig preset(const std::string& name);

/// Writes deployment.json, probes.ndjson, probes_raw.ndjson, cameras.ndjson,
/// ground_truth.json and scenario.json into `dir` (created if needed).
void write_outputs(const SimOutput& output, const ScenarioConfig& config,
                   const std::string& dir);

}  // namespace crowdsense
