#include "crowdsense/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "crowdsense/anonymize.hpp"
#include "crowdsense/errors.hpp"
#include "crowdsense/ingest.hpp"
#include "crowdsense/rng.hpp"
#include "json_util.hpp"

namespace crowdsense {

namespace {

// Substream tags; the derivation is substream(seed, tag, index) with
// index = pedestrian id, place index, choke index or session number.
constexpr std::uint64_t kStreamAccuracy = 1;
constexpr std::uint64_t kStreamArrivals = 2;
constexpr std::uint64_t kStreamPedestrian = 3;
constexpr std::uint64_t kStreamCamera = 4;
constexpr std::uint64_t kStreamSessions = 5;
constexpr std::uint64_t kStreamProbes = 6;

Point traj_position(const std::vector<TrajectoryPoint>& wp, double t) {
  if (t <= wp.front().t) return wp.front().pos;
  if (t >= wp.back().t) return wp.back().pos;
  auto it = std::upper_bound(wp.begin(), wp.end(), t,
                             [](double v, const TrajectoryPoint& p) { return v < p.t; });
  const TrajectoryPoint& b = *it;
  const TrajectoryPoint& a = *(it - 1);
  double span = b.t - a.t;
  if (span <= 0.0) return a.pos;
  double f = (t - a.t) / span;
  return Point{a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y)};
}

constexpr double kTau = 6.28318530717958647692;

std::int64_t session_of(std::int64_t t, std::int64_t period) {
  return t >= 0 ? t / period : (t - period + 1) / period;
}

}  // namespace

Point truth_position(const PedestrianTruth& ped, double t) {
  return traj_position(ped.waypoints, t);
}

std::map<std::string, std::size_t> anon_index(const GroundTruth& truth) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < truth.pedestrians.size(); ++i) {
    for (const auto& id : truth.pedestrians[i].anon_ids) {
      index.emplace(id, i);
    }
  }
  return index;
}

void ScenarioConfig::validate() const {
  auto check_prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(std::string(what) + " must lie in [0, 1]");
    }
  };
  check_prob(device_ownership_prob, "device_ownership_prob");
  check_prob(camera_accuracy_min, "camera_accuracy_min");
  check_prob(camera_accuracy_max, "camera_accuracy_max");
  check_prob(camera_double_count_rate, "camera_double_count_rate");
  check_prob(continue_prob, "continue_prob");
  if (camera_accuracy_min > camera_accuracy_max) {
    throw ConfigError("camera accuracy range inverted");
  }
  if (duration_s <= 0) throw ConfigError("duration_s must be positive");
  if (probe_interval_mean_s <= 0) throw ConfigError("probe interval must be positive");
  if (walking_speed_mps <= 0) throw ConfigError("walking speed must be positive");
  if (detection_range_m <= 0) throw ConfigError("detection range must be positive");
  if (path_loss_n <= 0) throw ConfigError("path-loss exponent must be positive");
  if (sigma_db < 0) throw ConfigError("sigma_db must be non-negative");
  if (!divides_hour(interval_s)) throw ConfigError("interval_s must divide 3600");
  if (epoch_s <= 0) throw ConfigError("epoch_s must be positive");
  if (session_period_s <= 0) throw ConfigError("session period must be positive");
  if (start_t % interval_s != 0) throw ConfigError("start_t must be interval-aligned");
  if (places.empty() && routes.empty()) {
    throw ConfigError("scenario needs at least one place or route");
  }
  std::set<std::string> place_ids;
  for (const auto& p : places) {
    if (!place_ids.insert(p.id).second) {
      throw ConfigError("duplicate place id '" + p.id + "'");
    }
    if (p.radius_m <= 0) throw ConfigError("place radius must be positive");
    if (p.dwell_mean_s <= 0) throw ConfigError("dwell mean must be positive");
  }
  for (const auto& p : places) {
    for (const auto& n : p.neighbors) {
      if (!place_ids.contains(n)) {
        throw ConfigError("place '" + p.id + "' references unknown neighbor '" + n + "'");
      }
      if (n == p.id) {
        throw ConfigError("place '" + p.id + "' lists itself as neighbor");
      }
    }
  }
  for (const auto& r : routes) {
    if (r.path.size() < 2) throw ConfigError("route '" + r.id + "' needs two points");
  }
  // Every choke point needs a co-located place to generate crossings for.
  for (const auto& [cid, cluster] : deployment.clusters()) {
    for (const auto* choke : deployment.choke_points(cid)) {
      if (!place_ids.contains(choke->sniffer_id)) {
        throw ConfigError("choke point '" + choke->id + "' has no place '" +
                          choke->sniffer_id + "'");
      }
    }
  }
  deployment.validate();
}

namespace {

struct Crossing {
  double t;
  bool inbound;
};

struct Visit {
  std::size_t place_index;
  double enter_t;  // destination footprint crossing
  double leave_t;
};

struct Pedestrian {
  std::uint64_t id = 0;
  bool has_device = false;
  MacAddress mac{};
  std::vector<TrajectoryPoint> waypoints;
  std::vector<Visit> visits;  // empty for route walkers
};

class Generator {
 public:
  explicit Generator(const ScenarioConfig& config) : cfg_(config) {
    cfg_.validate();
    for (const auto& [id, node] : cfg_.deployment.nodes()) {
      if (node.kind == NodeKind::WifiSniffer) sniffers_.push_back(&node);
    }
    for (std::size_t i = 0; i < cfg_.places.size(); ++i) {
      place_index_[cfg_.places[i].id] = i;
    }
  }

  SimOutput run() {
    draw_camera_accuracy();
    make_session_keys();
    spawn_pedestrians();
    build_trajectories();
    emit_probes();
    compute_truth();
    emit_camera_ticks();
    finalize();
    return std::move(out_);
  }

 private:
  ScenarioConfig cfg_;
  std::vector<const SensorNode*> sniffers_;
  std::map<std::string, std::size_t> place_index_;
  std::vector<Pedestrian> peds_;
  std::map<std::int64_t, SessionKey> session_keys_;
  std::int64_t first_session_ = 0;
  double accuracy_ = 0.0;
  SimOutput out_;

  struct ProbeRecord {
    double t;
    std::uint64_t ped;
    int seq;
    std::string sensor_id;
    int rssi;
  };
  std::vector<ProbeRecord> records_;

  std::int64_t end_t() const { return cfg_.start_t + cfg_.duration_s; }

  void draw_camera_accuracy() {
    Rng rng = substream(cfg_.seed, kStreamAccuracy, 0);
    accuracy_ = cfg_.camera_accuracy_min == cfg_.camera_accuracy_max
                    ? cfg_.camera_accuracy_min
                    : rng.uniform(cfg_.camera_accuracy_min, cfg_.camera_accuracy_max);
  }

  void make_session_keys() {
    first_session_ = session_of(cfg_.start_t, cfg_.session_period_s);
    std::int64_t last = session_of(end_t() - 1, cfg_.session_period_s);
    for (std::int64_t s = first_session_; s <= last; ++s) {
      Rng rng = substream(cfg_.seed, kStreamSessions, static_cast<std::uint64_t>(s));
      std::array<std::uint8_t, kSessionKeyBytes> material{};
      for (auto& b : material) b = static_cast<std::uint8_t>(rng.integer(256));
      session_keys_.emplace(
          s, SessionKey::from_bytes(material, static_cast<std::uint64_t>(s),
                                    s * cfg_.session_period_s,
                                    (s + 1) * cfg_.session_period_s));
    }
  }

  const SessionKey& key_for(std::int64_t t) const {
    auto it = session_keys_.find(session_of(t, cfg_.session_period_s));
    if (it == session_keys_.end()) {
      throw Error("internal: no session key for timestamp");
    }
    return it->second;
  }

  struct Spawn {
    bool on_route;
    std::size_t index;
    double t;
  };

  void spawn_pedestrians() {
    std::vector<Spawn> spawns;
    std::int64_t hours = (cfg_.duration_s + 3599) / 3600;
    auto spawn_from = [&](const DiurnalRate& rates, bool on_route, std::size_t index,
                          std::uint64_t stream_index) {
      Rng rng = substream(cfg_.seed, kStreamArrivals, stream_index);
      for (std::int64_t h = 0; h < hours; ++h) {
        std::int64_t hstart = cfg_.start_t + h * 3600;
        double span = std::min<double>(3600.0, static_cast<double>(end_t() - hstart));
        double rate = rates[hour_of_day(hstart)] * span / 3600.0;
        std::int64_t n = rng.poisson(rate);
        for (std::int64_t k = 0; k < n; ++k) {
          spawns.push_back(Spawn{on_route, index, hstart + rng.uniform(0.0, span)});
        }
      }
    };
    for (std::size_t i = 0; i < cfg_.places.size(); ++i) {
      spawn_from(cfg_.places[i].arrivals_per_hour, false, i, i);
    }
    for (std::size_t i = 0; i < cfg_.routes.size(); ++i) {
      spawn_from(cfg_.routes[i].arrivals_per_hour, true, i, cfg_.places.size() + i);
    }
    // Stable pedestrian numbering: enumeration order above is deterministic.
    peds_.reserve(spawns.size());
    spawn_list_ = std::move(spawns);
    for (std::size_t i = 0; i < spawn_list_.size(); ++i) {
      Pedestrian ped;
      ped.id = static_cast<std::uint64_t>(i);
      peds_.push_back(std::move(ped));
    }
  }

  std::vector<Spawn> spawn_list_;

  Point spawn_point(Rng& rng, const Point& anchor) {
    if (!cfg_.entry_points.empty()) {
      return cfg_.entry_points[rng.integer(cfg_.entry_points.size())];
    }
    double angle = rng.uniform(0.0, kTau);
    return Point{anchor.x + cfg_.spawn_offset_m * std::sin(angle),
                 anchor.y + cfg_.spawn_offset_m * std::cos(angle)};
  }

  void build_trajectories() {
    for (std::size_t i = 0; i < peds_.size(); ++i) {
      Rng rng = substream(cfg_.seed, kStreamPedestrian, i);
      Pedestrian& ped = peds_[i];
      const Spawn& spawn = spawn_list_[i];

      ped.has_device = rng.bernoulli(cfg_.device_ownership_prob);
      for (auto& octet : ped.mac.octets) {
        octet = static_cast<std::uint8_t>(rng.integer(256));
      }

      if (spawn.on_route) {
        build_route_walk(ped, rng, cfg_.routes[spawn.index], spawn.t);
      } else {
        build_place_trip(ped, rng, spawn.index, spawn.t);
      }
    }
  }

  void build_route_walk(Pedestrian& ped, Rng& /*rng*/, const RouteSpec& route,
                        double t0) {
    double t = t0;
    ped.waypoints.push_back({t, route.path.front()});
    for (std::size_t k = 1; k < route.path.size(); ++k) {
      t += distance(route.path[k - 1], route.path[k]) / cfg_.walking_speed_mps;
      ped.waypoints.push_back({t, route.path[k]});
    }
  }

  void build_place_trip(Pedestrian& ped, Rng& rng, std::size_t first_place, double t0) {
    const PlaceSpec* place = &cfg_.places[first_place];
    std::size_t place_idx = first_place;
    Point entry = spawn_point(rng, place->position);
    double t = t0;
    ped.waypoints.push_back({t, entry});

    Point from = entry;
    int visited = 0;
    for (;;) {
      double walk_s = distance(from, place->position) / cfg_.walking_speed_mps;
      double arrive = t + walk_s;
      // Footprint crossing on the (straight, center-bound) approach.
      double enter = arrive - place->radius_m / cfg_.walking_speed_mps;
      enter = std::max(enter, t);
      double dwell = std::max(cfg_.min_dwell_s, rng.exponential(place->dwell_mean_s));
      double depart = arrive + dwell;
      ped.waypoints.push_back({arrive, place->position});
      ped.waypoints.push_back({depart, place->position});
      ped.visits.push_back(Visit{place_idx, enter, 0.0});
      ++visited;

      bool walk_on = visited < cfg_.max_places_per_trip && !place->neighbors.empty() &&
                     rng.bernoulli(cfg_.continue_prob);
      if (!walk_on) {
        Point exit = spawn_point(rng, place->position);
        double leave_cross =
            depart + place->radius_m / cfg_.walking_speed_mps;  // outbound crossing
        double end = depart + distance(place->position, exit) / cfg_.walking_speed_mps;
        ped.visits.back().leave_t = std::min(leave_cross, end);
        ped.waypoints.push_back({end, exit});
        return;
      }
      const std::string& next_id =
          place->neighbors[rng.integer(place->neighbors.size())];
      std::size_t next_idx = place_index_.at(next_id);
      double leave_cross = depart + place->radius_m / cfg_.walking_speed_mps;
      double next_arrive = depart + distance(place->position,
                                             cfg_.places[next_idx].position) /
                                        cfg_.walking_speed_mps;
      ped.visits.back().leave_t = std::min(leave_cross, next_arrive);
      from = place->position;
      t = depart;
      place_idx = next_idx;
      place = &cfg_.places[next_idx];
    }
  }

  void emit_probes() {
    for (std::size_t i = 0; i < peds_.size(); ++i) {
      Pedestrian& ped = peds_[i];
      if (!ped.has_device) continue;
      Rng rng = substream(cfg_.seed, kStreamProbes, i);
      double born = ped.waypoints.front().t;
      double gone = ped.waypoints.back().t;
      int seq = static_cast<int>(rng.integer(4096));
      double t = born + rng.exponential(cfg_.probe_interval_mean_s);
      while (t < gone) {
        emit_one_probe(ped, rng, t, seq);
        seq = (seq + 1) & 0xfff;
        t += rng.exponential(cfg_.probe_interval_mean_s);
      }
    }
  }

  void emit_one_probe(Pedestrian& ped, Rng& rng, double t, int seq) {
    Point pos = traj_position(ped.waypoints, t);
    bool in_window = t >= static_cast<double>(cfg_.start_t) &&
                     t < static_cast<double>(end_t());
    // Noise draws happen for every in-range node even when the emission is
    // clipped, so the stream stays aligned under duration changes.
    for (const SensorNode* node : sniffers_) {
      double d = distance(pos, node->position);
      if (d > cfg_.detection_range_m) continue;
      double rssi = cfg_.p0 - 10.0 * cfg_.path_loss_n * std::log10(std::max(d, 1.0));
      for (const auto& wall : cfg_.walls) {
        rssi -= wall.loss_db * segment_rect_crossings(pos, node->position, wall.rect);
      }
      rssi += rng.normal(0.0, cfg_.sigma_db);
      if (!in_window) continue;
      int quantized = static_cast<int>(std::lround(rssi));
      if (quantized > 0) quantized = 0;
      if (quantized < -100) continue;  // below the receiver floor
      records_.push_back(ProbeRecord{t, ped.id, seq, node->id, quantized});
    }
  }

  void compute_truth() {
    out_.truth.camera_accuracy_used = accuracy_;
    std::map<std::pair<std::string, std::int64_t>, std::int64_t> area_cells;

    for (const auto& ped : peds_) {
      // Geometric presence ranges per place.
      for (const auto& place : cfg_.places) {
        Circle footprint{place.position, place.radius_m};
        std::vector<TimeRange> ranges;
        for (std::size_t k = 1; k < ped.waypoints.size(); ++k) {
          TimeRange r;
          if (segment_circle_overlap(ped.waypoints[k - 1].pos, ped.waypoints[k].pos,
                                     ped.waypoints[k - 1].t, ped.waypoints[k].t,
                                     footprint, r)) {
            ranges.push_back(r);
          }
        }
        if (ranges.empty()) continue;
        std::sort(ranges.begin(), ranges.end(),
                  [](const TimeRange& a, const TimeRange& b) { return a.begin < b.begin; });
        std::vector<TimeRange> merged;
        for (const auto& r : ranges) {
          if (!merged.empty() && r.begin <= merged.back().end + 1e-6) {
            merged.back().end = std::max(merged.back().end, r.end);
          } else {
            merged.push_back(r);
          }
        }
        std::set<std::int64_t> intervals;
        for (const auto& r : merged) {
          double b = std::max(r.begin, static_cast<double>(cfg_.start_t));
          double e = std::min(r.end, static_cast<double>(end_t()) - 1e-9);
          if (b >= e) continue;
          std::int64_t first = bucket_of(static_cast<std::int64_t>(b), cfg_.interval_s).start;
          std::int64_t last = bucket_of(static_cast<std::int64_t>(e), cfg_.interval_s).start;
          for (std::int64_t s = first; s <= last; s += cfg_.interval_s) {
            intervals.insert(s);
          }
        }
        for (std::int64_t s : intervals) {
          ++area_cells[{place.id, s}];
        }
      }

      // Transits between consecutively visited places.
      for (std::size_t v = 1; v < ped.visits.size(); ++v) {
        const Visit& a = ped.visits[v - 1];
        const Visit& b = ped.visits[v];
        if (b.enter_t >= static_cast<double>(end_t())) continue;
        out_.truth.transits.push_back(TransitTruth{
            cfg_.places[a.place_index].id, cfg_.places[b.place_index].id,
            static_cast<std::int64_t>(b.enter_t), ped.id, ped.has_device});
      }
    }

    for (const auto& [key, people] : area_cells) {
      out_.truth.area_counts.push_back(
          AreaCountTruth{key.first, Interval{key.second, cfg_.interval_s}, people});
    }
    std::sort(out_.truth.transits.begin(), out_.truth.transits.end(),
              [](const TransitTruth& a, const TransitTruth& b) {
                if (a.t != b.t) return a.t < b.t;
                return a.ped < b.ped;
              });

    build_pedestrian_truth();
    if (cfg_.building) build_presence_truth();
  }

  void build_pedestrian_truth() {
    out_.truth.pedestrians.reserve(peds_.size());
    for (const auto& ped : peds_) {
      PedestrianTruth truth;
      truth.id = ped.id;
      truth.has_device = ped.has_device;
      truth.waypoints = ped.waypoints;
      if (ped.has_device) {
        truth.mac = ped.mac.to_string();
        double born = ped.waypoints.front().t;
        double gone = ped.waypoints.back().t;
        std::int64_t s_first = std::max(
            first_session_, session_of(static_cast<std::int64_t>(born),
                                       cfg_.session_period_s));
        std::int64_t s_last = std::min(
            session_of(end_t() - 1, cfg_.session_period_s),
            session_of(static_cast<std::int64_t>(gone), cfg_.session_period_s));
        truth.first_session = static_cast<std::uint64_t>(s_first);
        for (std::int64_t s = s_first; s <= s_last; ++s) {
          truth.anon_ids.push_back(
              derive_anon_id(ped.mac, session_keys_.at(s)).hex);
        }
      }
      out_.truth.pedestrians.push_back(std::move(truth));
    }
  }

  void build_presence_truth() {
    const Rectangle& building = *cfg_.building;
    Coverage cover = Coverage::rectangle(building.min, building.max);
    for (const auto& truth : out_.truth.pedestrians) {
      if (!truth.has_device) continue;
      std::int64_t born = static_cast<std::int64_t>(truth.born_t());
      std::int64_t gone = static_cast<std::int64_t>(truth.gone_t());
      std::int64_t epoch = bucket_of(std::max(born, cfg_.start_t), cfg_.epoch_s).start;
      for (; epoch < std::min(gone, end_t()); epoch += cfg_.epoch_s) {
        double mid = static_cast<double>(epoch) + static_cast<double>(cfg_.epoch_s) / 2.0;
        if (mid < truth.born_t() || mid > truth.gone_t()) continue;
        Point pos = truth_position(truth, mid);
        std::int64_t session = session_of(epoch, cfg_.session_period_s);
        std::int64_t offset = session - static_cast<std::int64_t>(truth.first_session);
        if (offset < 0 || offset >= static_cast<std::int64_t>(truth.anon_ids.size())) {
          continue;
        }
        out_.truth.presence.push_back(
            PresenceTruth{truth.anon_ids[static_cast<std::size_t>(offset)], epoch,
                          cover.contains(pos)});
      }
    }
    std::sort(out_.truth.presence.begin(), out_.truth.presence.end(),
              [](const PresenceTruth& a, const PresenceTruth& b) {
                if (a.epoch_start != b.epoch_start) return a.epoch_start < b.epoch_start;
                return a.anon_id < b.anon_id;
              });
  }

  void emit_camera_ticks() {
    // Choke points in id order; crossings come from the co-located place.
    std::vector<const SensorNode*> chokes;
    for (const auto& [cid, cluster] : cfg_.deployment.clusters()) {
      for (const auto* choke : cfg_.deployment.choke_points(cid)) {
        chokes.push_back(choke);
      }
    }
    std::sort(chokes.begin(), chokes.end(),
              [](const SensorNode* a, const SensorNode* b) { return a->id < b->id; });

    for (std::size_t c = 0; c < chokes.size(); ++c) {
      const SensorNode* choke = chokes[c];
      std::size_t place_idx = place_index_.at(choke->sniffer_id);
      std::vector<Crossing> crossings;
      for (const auto& ped : peds_) {
        for (const auto& visit : ped.visits) {
          if (visit.place_index != place_idx) continue;
          crossings.push_back(Crossing{visit.enter_t, true});
          crossings.push_back(Crossing{visit.leave_t, false});
        }
      }
      std::sort(crossings.begin(), crossings.end(),
                [](const Crossing& a, const Crossing& b) { return a.t < b.t; });

      Rng rng = substream(cfg_.seed, kStreamCamera, c);
      std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> buckets;
      for (std::int64_t s = cfg_.start_t; s < end_t(); s += cfg_.interval_s) {
        buckets[s] = {0, 0};
      }
      for (const auto& crossing : crossings) {
        if (crossing.t < static_cast<double>(cfg_.start_t) ||
            crossing.t >= static_cast<double>(end_t())) {
          continue;
        }
        ++out_.truth.true_crossings;
        int counted = rng.bernoulli(accuracy_) ? 1 : 0;
        if (counted && cfg_.camera_double_count_rate > 0.0 &&
            rng.bernoulli(cfg_.camera_double_count_rate)) {
          counted = 2;
        }
        if (counted == 0) continue;
        auto& cell = buckets[bucket_of(static_cast<std::int64_t>(crossing.t),
                                       cfg_.interval_s)
                                 .start];
        (crossing.inbound ? cell.first : cell.second) += counted;
      }
      for (const auto& [start, cell] : buckets) {
        out_.camera_ticks.push_back(CameraTick{
            choke->camera_id, Interval{start, cfg_.interval_s}, cell.first, cell.second});
      }
    }
  }

  void finalize() {
    std::sort(records_.begin(), records_.end(),
              [](const ProbeRecord& a, const ProbeRecord& b) {
                if (a.t != b.t) return a.t < b.t;
                if (a.ped != b.ped) return a.ped < b.ped;
                return a.sensor_id < b.sensor_id;
              });
    out_.raw_probes.reserve(records_.size());
    out_.probes.reserve(records_.size());
    for (const auto& r : records_) {
      const Pedestrian& ped = peds_[r.ped];
      std::int64_t t = static_cast<std::int64_t>(r.t);
      RawProbeEvent raw;
      raw.sensor_id = r.sensor_id;
      raw.mac = ped.mac.to_string();
      raw.t = t;
      raw.rssi = r.rssi;
      raw.seq = r.seq;
      out_.raw_probes.push_back(raw);
      ProbeEvent e;
      e.sensor_id = r.sensor_id;
      e.anon_id = derive_anon_id(ped.mac, key_for(t)).hex;
      e.t = t;
      e.rssi = r.rssi;
      e.seq = r.seq;
      out_.probes.push_back(std::move(e));
    }
  }
};

}  // namespace

SimOutput generate(const ScenarioConfig& config) {
  Generator generator(config);
  return generator.run();
}

namespace {

using detail::ordered_json;

DiurnalRate scaled_profile(double scale) {
  // Shared diurnal shape: quiet nights, busy midday, evening peak.
  constexpr double shape[24] = {0.30, 0.25, 0.22, 0.22, 0.25, 0.32, 0.45, 0.60,
                                0.75, 0.80, 0.85, 0.90, 0.90, 0.85, 0.80, 0.80,
                                0.85, 1.00, 0.95, 0.80, 0.60, 0.50, 0.42, 0.35};
  DiurnalRate rate{};
  for (int h = 0; h < 24; ++h) rate[h] = scale * shape[h];
  return rate;
}

ScenarioConfig goldcoast_preset() {
  ScenarioConfig cfg;
  cfg.seed = 7;
  cfg.duration_s = 86400;
  cfg.device_ownership_prob = 0.75;
  cfg.probe_interval_mean_s = 30.0;
  cfg.p0 = -40.0;
  cfg.path_loss_n = 2.0;
  cfg.sigma_db = 3.0;
  cfg.detection_range_m = 22.0;
  cfg.camera_accuracy_min = 0.88;
  cfg.camera_accuracy_max = 0.98;
  cfg.walking_speed_mps = 1.4;
  cfg.continue_prob = 0.6;
  cfg.spawn_offset_m = 30.0;

  struct ClusterPlan {
    std::string prefix;
    std::string cluster;
    TrafficClass traffic;
    int sniffers;
    double y;
    int choke_at;  // 1-based sniffer index carrying the camera
    double rate_scale;
  };
  const ClusterPlan plans[] = {
      {"gc1", "cluster-1", TrafficClass::Heavy, 9, 0.0, 5, 90.0},
      {"gc2", "cluster-2", TrafficClass::Light, 8, 400.0, 4, 40.0},
  };

  for (const auto& plan : plans) {
    ClusterSpec cluster;
    cluster.cluster_id = plan.cluster;
    cluster.traffic_class = plan.traffic;
    std::string camera_id = plan.prefix + "-cam";
    std::string choke_id = plan.prefix + "-choke";
    std::string choke_sniffer;
    for (int i = 1; i <= plan.sniffers; ++i) {
      SensorNode node;
      node.id = plan.prefix + "-s" + std::to_string(i);
      node.kind = NodeKind::WifiSniffer;
      node.position = Point{60.0 * (i - 1), plan.y};
      node.coverage = Coverage::circle(node.position, 22.0);
      node.cluster_id = plan.cluster;
      if (i == plan.choke_at) choke_sniffer = node.id;
      cluster.members.push_back(node.id);

      PlaceSpec place;
      place.id = node.id;
      place.position = node.position;
      place.radius_m = 22.0;
      place.dwell_mean_s = 240.0;
      place.arrivals_per_hour = scaled_profile(plan.rate_scale);
      place.cluster_id = plan.cluster;
      if (i > 1) place.neighbors.push_back(plan.prefix + "-s" + std::to_string(i - 1));
      if (i < plan.sniffers) {
        place.neighbors.push_back(plan.prefix + "-s" + std::to_string(i + 1));
      }
      cfg.places.push_back(std::move(place));
      cfg.deployment.add_node(std::move(node));
    }

    Point cam_pos{60.0 * (plan.choke_at - 1), plan.y};
    SensorNode camera;
    camera.id = camera_id;
    camera.kind = NodeKind::StereoCamera;
    camera.position = cam_pos;
    camera.coverage = Coverage::circle(cam_pos, 22.0);
    camera.cluster_id = plan.cluster;
    cluster.members.push_back(camera.id);
    cfg.deployment.add_node(std::move(camera));

    SensorNode choke;
    choke.id = choke_id;
    choke.kind = NodeKind::CalibrationChokePoint;
    choke.position = cam_pos;
    choke.coverage = Coverage::circle(cam_pos, 22.0);
    choke.cluster_id = plan.cluster;
    choke.camera_id = camera_id;
    choke.sniffer_id = choke_sniffer;
    cluster.members.push_back(choke.id);
    cfg.deployment.add_node(std::move(choke));

    cfg.deployment.add_cluster(std::move(cluster));
  }
  return cfg;
}

ScenarioConfig santander_preset() {
  ScenarioConfig cfg;
  cfg.seed = 11;
  cfg.duration_s = 10800;  // three market hours, daytime
  cfg.start_t = 10 * 3600;
  cfg.device_ownership_prob = 0.8;
  cfg.probe_interval_mean_s = 20.0;
  cfg.p0 = -41.0;
  cfg.path_loss_n = 2.1;
  cfg.sigma_db = 3.0;
  cfg.detection_range_m = 70.0;
  cfg.walking_speed_mps = 1.0;
  cfg.continue_prob = 0.65;
  cfg.camera_accuracy_min = cfg.camera_accuracy_max = 0.93;  // no cameras deployed

  Rectangle building{{0.0, 0.0}, {40.0, 20.0}};
  cfg.building = building;
  cfg.walls.push_back(WallSpec{building, 12.0});
  cfg.entry_points = {{20.0, -8.0}, {20.0, 28.0}};

  ClusterSpec cluster;
  cluster.cluster_id = "market";
  cluster.traffic_class = TrafficClass::Heavy;
  const Point node_positions[8] = {{0, 0},   {20, 0},  {40, 0},  {40, 10},
                                   {40, 20}, {20, 20}, {0, 20},  {0, 10}};
  for (int i = 0; i < 8; ++i) {
    SensorNode node;
    node.id = "sm-n" + std::to_string(i + 1);
    node.kind = NodeKind::WifiSniffer;
    node.position = node_positions[i];
    node.coverage = Coverage::circle(node.position, 70.0);
    node.cluster_id = "market";
    cluster.members.push_back(node.id);
    cfg.deployment.add_node(std::move(node));
  }
  cfg.deployment.add_cluster(std::move(cluster));
  cfg.deployment.add_region(
      Region{"market", {20.0, 10.0}, Coverage::rectangle(building.min, building.max)});

  const Point spots[6] = {{8, 6}, {20, 5}, {32, 6}, {8, 14}, {20, 15}, {32, 14}};
  const std::vector<std::vector<int>> adjacency = {{1, 3}, {0, 2, 4}, {1, 5},
                                                   {0, 4}, {1, 3, 5}, {2, 4}};
  for (int i = 0; i < 6; ++i) {
    PlaceSpec place;
    place.id = "sm-p" + std::to_string(i + 1);
    place.position = spots[i];
    place.radius_m = 5.0;
    place.dwell_mean_s = 360.0;
    place.arrivals_per_hour = scaled_profile(14.0);
    place.cluster_id = "market";
    for (int j : adjacency[i]) place.neighbors.push_back("sm-p" + std::to_string(j + 1));
    cfg.places.push_back(std::move(place));
  }

  RouteSpec street;
  street.id = "street";
  street.path = {{-25.0, -10.0}, {65.0, -10.0}};
  street.arrivals_per_hour = scaled_profile(70.0);
  cfg.routes.push_back(std::move(street));
  return cfg;
}

}  // namespace

ScenarioConfig preset(const std::string& name) {
  if (name == "goldcoast") return goldcoast_preset();
  if (name == "santander") return santander_preset();
  throw UnknownPresetError("unknown preset '" + name + "'");
}

namespace {

ordered_json diurnal_to_json(const DiurnalRate& rate) {
  auto arr = ordered_json::array();
  for (double v : rate) arr.push_back(v);
  return arr;
}

DiurnalRate diurnal_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 24) {
    throw ParseError("arrivals_per_hour must have 24 entries");
  }
  DiurnalRate rate{};
  for (int h = 0; h < 24; ++h) rate[h] = j[h].get<double>();
  return rate;
}

ordered_json rect_to_json(const Rectangle& r) {
  ordered_json j;
  j["min"] = detail::point_to_json(r.min);
  j["max"] = detail::point_to_json(r.max);
  return j;
}

Rectangle rect_from_json(const nlohmann::json& j) {
  return Rectangle{detail::point_from_json(j.at("min"), "rect.min"),
                   detail::point_from_json(j.at("max"), "rect.max")};
}

}  // namespace

std::string ScenarioConfig::to_json() const {
  ordered_json j;
  j["seed"] = seed;
  j["start_t"] = start_t;
  j["duration_s"] = duration_s;
  j["deployment"] = nlohmann::ordered_json::parse(deployment.to_json());
  auto places_json = ordered_json::array();
  for (const auto& p : places) {
    ordered_json pj;
    pj["id"] = p.id;
    pj["pos"] = detail::point_to_json(p.position);
    pj["radius_m"] = p.radius_m;
    pj["dwell_mean_s"] = p.dwell_mean_s;
    pj["arrivals_per_hour"] = diurnal_to_json(p.arrivals_per_hour);
    pj["neighbors"] = p.neighbors;
    pj["cluster"] = p.cluster_id;
    places_json.push_back(std::move(pj));
  }
  j["places"] = std::move(places_json);
  auto routes_json = ordered_json::array();
  for (const auto& r : routes) {
    ordered_json rj;
    rj["id"] = r.id;
    auto path = ordered_json::array();
    for (const auto& p : r.path) path.push_back(detail::point_to_json(p));
    rj["path"] = std::move(path);
    rj["arrivals_per_hour"] = diurnal_to_json(r.arrivals_per_hour);
    routes_json.push_back(std::move(rj));
  }
  j["routes"] = std::move(routes_json);
  auto doors = ordered_json::array();
  for (const auto& p : entry_points) doors.push_back(detail::point_to_json(p));
  j["entry_points"] = std::move(doors);
  j["device_ownership_prob"] = device_ownership_prob;
  j["probe_interval_mean_s"] = probe_interval_mean_s;
  ordered_json radio;
  radio["p0"] = p0;
  radio["n"] = path_loss_n;
  radio["sigma_db"] = sigma_db;
  radio["detection_range_m"] = detection_range_m;
  j["radio"] = std::move(radio);
  auto walls_json = ordered_json::array();
  for (const auto& w : walls) {
    ordered_json wj;
    wj["rect"] = rect_to_json(w.rect);
    wj["loss_db"] = w.loss_db;
    walls_json.push_back(std::move(wj));
  }
  j["walls"] = std::move(walls_json);
  j["camera_accuracy"] = ordered_json::array({camera_accuracy_min, camera_accuracy_max});
  j["camera_double_count_rate"] = camera_double_count_rate;
  j["walking_speed_mps"] = walking_speed_mps;
  j["continue_prob"] = continue_prob;
  j["max_places_per_trip"] = max_places_per_trip;
  j["min_dwell_s"] = min_dwell_s;
  j["spawn_offset_m"] = spawn_offset_m;
  j["interval_s"] = interval_s;
  j["epoch_s"] = epoch_s;
  j["session_period_s"] = session_period_s;
  if (building) j["building"] = rect_to_json(*building);
  return j.dump(2) + "\n";
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  auto j = detail::parse_json(text, "scenario");
  ScenarioConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.start_t = j.value("start_t", std::int64_t{0});
  cfg.duration_s = j.value("duration_s", std::int64_t{86400});
  if (j.contains("deployment")) {
    cfg.deployment = Deployment::from_json(j.at("deployment").dump());
  }
  for (const auto& pj : j.value("places", nlohmann::json::array())) {
    PlaceSpec p;
    p.id = pj.at("id").get<std::string>();
    p.position = detail::point_from_json(pj.at("pos"), "place.pos");
    p.radius_m = pj.value("radius_m", 20.0);
    p.dwell_mean_s = pj.value("dwell_mean_s", 240.0);
    p.arrivals_per_hour = diurnal_from_json(pj.at("arrivals_per_hour"));
    for (const auto& n : pj.value("neighbors", nlohmann::json::array())) {
      p.neighbors.push_back(n.get<std::string>());
    }
    p.cluster_id = pj.value("cluster", "");
    cfg.places.push_back(std::move(p));
  }
  for (const auto& rj : j.value("routes", nlohmann::json::array())) {
    RouteSpec r;
    r.id = rj.at("id").get<std::string>();
    for (const auto& p : rj.at("path")) {
      r.path.push_back(detail::point_from_json(p, "route.path[]"));
    }
    r.arrivals_per_hour = diurnal_from_json(rj.at("arrivals_per_hour"));
    cfg.routes.push_back(std::move(r));
  }
  for (const auto& p : j.value("entry_points", nlohmann::json::array())) {
    cfg.entry_points.push_back(detail::point_from_json(p, "entry_points[]"));
  }
  cfg.device_ownership_prob = j.value("device_ownership_prob", 0.75);
  cfg.probe_interval_mean_s = j.value("probe_interval_mean_s", 30.0);
  if (j.contains("radio")) {
    const auto& radio = j.at("radio");
    cfg.p0 = radio.value("p0", -40.0);
    cfg.path_loss_n = radio.value("n", 2.0);
    cfg.sigma_db = radio.value("sigma_db", 3.0);
    cfg.detection_range_m = radio.value("detection_range_m", 25.0);
  }
  for (const auto& wj : j.value("walls", nlohmann::json::array())) {
    cfg.walls.push_back(WallSpec{rect_from_json(wj.at("rect")), wj.value("loss_db", 12.0)});
  }
  if (j.contains("camera_accuracy")) {
    const auto& acc = j.at("camera_accuracy");
    if (acc.is_array() && acc.size() == 2) {
      cfg.camera_accuracy_min = acc[0].get<double>();
      cfg.camera_accuracy_max = acc[1].get<double>();
    } else if (acc.is_number()) {
      cfg.camera_accuracy_min = cfg.camera_accuracy_max = acc.get<double>();
    } else {
      throw ParseError("camera_accuracy must be a number or [min, max]");
    }
  }
  cfg.camera_double_count_rate = j.value("camera_double_count_rate", 0.0);
  cfg.walking_speed_mps = j.value("walking_speed_mps", 1.4);
  cfg.continue_prob = j.value("continue_prob", 0.6);
  cfg.max_places_per_trip = j.value("max_places_per_trip", 8);
  cfg.min_dwell_s = j.value("min_dwell_s", 5.0);
  cfg.spawn_offset_m = j.value("spawn_offset_m", 30.0);
  cfg.interval_s = j.value("interval_s", std::int64_t{300});
  cfg.epoch_s = j.value("epoch_s", std::int64_t{60});
  cfg.session_period_s = j.value("session_period_s", std::int64_t{86400});
  if (j.contains("building")) cfg.building = rect_from_json(j.at("building"));
  cfg.validate();
  return cfg;
}

std::string GroundTruth::to_json() const {
  ordered_json j;
  j["camera_accuracy_used"] = camera_accuracy_used;
  j["true_crossings"] = true_crossings;
  auto counts = ordered_json::array();
  for (const auto& c : area_counts) {
    counts.push_back(ordered_json::array(
        {c.area_id, c.interval.start, c.interval.length_s, c.people}));
  }
  j["area_counts"] = std::move(counts);
  auto transits_json = ordered_json::array();
  for (const auto& t : transits) {
    ordered_json tj;
    tj["from"] = t.from;
    tj["to"] = t.to;
    tj["t"] = t.t;
    tj["ped"] = t.ped;
    tj["device"] = t.has_device;
    transits_json.push_back(std::move(tj));
  }
  j["transits"] = std::move(transits_json);
  auto peds_json = ordered_json::array();
  for (const auto& p : pedestrians) {
    ordered_json pj;
    pj["id"] = p.id;
    pj["device"] = p.has_device;
    if (p.has_device) {
      pj["mac"] = p.mac;
      pj["anon_ids"] = p.anon_ids;
      pj["first_session"] = p.first_session;
    }
    auto wps = ordered_json::array();
    for (const auto& w : p.waypoints) {
      wps.push_back(ordered_json::array({w.t, w.pos.x, w.pos.y}));
    }
    pj["waypoints"] = std::move(wps);
    peds_json.push_back(std::move(pj));
  }
  j["pedestrians"] = std::move(peds_json);
  auto presence_json = ordered_json::array();
  for (const auto& p : presence) {
    presence_json.push_back(ordered_json::array({p.anon_id, p.epoch_start, p.inside}));
  }
  j["presence"] = std::move(presence_json);
  return j.dump() + "\n";
}

void write_outputs(const SimOutput& output, const ScenarioConfig& config,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + name + " under " + dir);
    out << content;
  };
  write("deployment.json", config.deployment.to_json());
  write("scenario.json", config.to_json());
  std::string probes;
  for (const auto& e : output.probes) {
    probes += format_probe(e);
    probes += '\n';
  }
  write("probes.ndjson", probes);
  std::string raw;
  for (const auto& e : output.raw_probes) {
    raw += format_raw_probe(e);
    raw += '\n';
  }
  write("probes_raw.ndjson", raw);
  std::string cams;
  for (const auto& t : output.camera_ticks) {
    cams += format_camera(t);
    cams += '\n';
  }
  write("cameras.ndjson", cams);
  write("ground_truth.json", output.truth.to_json());
}

}  // namespace crowdsense
