#include "crowdsense/locate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "crowdsense/errors.hpp"
#include "json_util.hpp"

namespace crowdsense {

namespace {

// Strongest sighting per node; map keeps node order deterministic.
std::map<std::string, const Sighting*> strongest_per_node(
    std::span<const Sighting> sightings) {
  std::map<std::string, const Sighting*> best;
  for (const auto& s : sightings) {
    auto [it, inserted] = best.try_emplace(s.node_id, &s);
    if (!inserted && s.rssi > it->second->rssi) it->second = &s;
  }
  return best;
}

constexpr double kMinDistanceM = 1e-3;  // guard for rssi above p0

}  // namespace

PresenceVerdict detect_presence(std::span<const Sighting> sightings,
                                const std::string& anon_id, const Interval& epoch,
                                const PresenceParams& params) {
  PresenceVerdict verdict;
  verdict.anon_id = anon_id;
  verdict.epoch = epoch;
  for (const auto& [node, s] : strongest_per_node(sightings)) {
    if (s->rssi >= params.rssi_min) ++verdict.supporting_nodes;
  }
  verdict.inside = verdict.supporting_nodes >= params.min_nodes;
  return verdict;
}

double rssi_to_distance(double rssi, const PathLossParams& params) {
  return std::pow(10.0, (params.p0 - rssi) / (10.0 * params.n));
}

PositionFix weighted_centroid(std::span<const Sighting> sightings,
                              const PathLossParams& params) {
  if (sightings.empty()) {
    throw NoSightingsError("weighted centroid needs at least one sighting");
  }
  auto best = strongest_per_node(sightings);
  double wx = 0.0, wy = 0.0, wsum = 0.0;
  for (const auto& [node, s] : best) {
    double d = std::max(rssi_to_distance(s->rssi, params), kMinDistanceM);
    double w = 1.0 / std::pow(d, params.g);
    wx += w * s->position.x;
    wy += w * s->position.y;
    wsum += w;
  }
  PositionFix fix;
  fix.anon_id = std::string(sightings.front().anon_id);
  fix.t = std::max_element(sightings.begin(), sightings.end(),
                           [](const Sighting& a, const Sighting& b) { return a.t < b.t; })
              ->t;
  fix.point = Point{wx / wsum, wy / wsum};
  fix.n_nodes_used = static_cast<int>(best.size());
  return fix;
}

std::int64_t HeatGrid::total() const {
  std::int64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

HeatGrid heatmap(std::span<const PositionFix> fixes, const GridSpec& spec) {
  if (spec.cell_size_m <= 0.0) throw RangeError("cell size must be positive");
  if (spec.rows <= 0 || spec.cols <= 0) throw RangeError("grid must have cells");
  HeatGrid grid;
  grid.spec = spec;
  grid.counts.assign(static_cast<std::size_t>(spec.rows) * spec.cols, 0);
  for (const auto& f : fixes) {
    int col = static_cast<int>(std::floor((f.point.x - spec.origin.x) / spec.cell_size_m));
    int row = static_cast<int>(std::floor((f.point.y - spec.origin.y) / spec.cell_size_m));
    if (col < 0 || col >= spec.cols || row < 0 || row >= spec.rows) {
      ++grid.overflow;
    } else {
      ++grid.at(row, col);
    }
  }
  return grid;
}

std::string heatgrid_to_text(const HeatGrid& grid) {
  std::ostringstream out;
  for (int row = grid.spec.rows - 1; row >= 0; --row) {
    for (int col = 0; col < grid.spec.cols; ++col) {
      if (col) out << '\t';
      out << grid.at(row, col);
    }
    out << '\n';
  }
  return out.str();
}

std::string heatgrid_to_pgm(const HeatGrid& grid) {
  std::int64_t peak = 0;
  for (auto c : grid.counts) peak = std::max(peak, c);
  std::ostringstream out;
  out << "P2\n" << grid.spec.cols << ' ' << grid.spec.rows << "\n255\n";
  for (int row = grid.spec.rows - 1; row >= 0; --row) {
    for (int col = 0; col < grid.spec.cols; ++col) {
      int v = peak == 0 ? 255
                        : 255 - static_cast<int>(255.0 * static_cast<double>(
                                                             grid.at(row, col)) /
                                                 static_cast<double>(peak));
      if (col) out << ' ';
      out << v;
    }
    out << '\n';
  }
  return out.str();
}

std::string heatgrid_to_svg(const HeatGrid& grid) {
  const int cell_px = 12;
  std::int64_t peak = 0;
  for (auto c : grid.counts) peak = std::max(peak, c);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << grid.spec.cols * cell_px << "\" height=\"" << grid.spec.rows * cell_px
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (int row = 0; row < grid.spec.rows; ++row) {
    for (int col = 0; col < grid.spec.cols; ++col) {
      std::int64_t c = grid.at(row, col);
      if (c == 0) continue;
      double frac = peak > 0 ? static_cast<double>(c) / static_cast<double>(peak) : 0.0;
      int red = 255;
      int other = 255 - static_cast<int>(215.0 * frac);
      // SVG y grows downward; row 0 is the south edge.
      int y = (grid.spec.rows - 1 - row) * cell_px;
      out << "<rect x=\"" << col * cell_px << "\" y=\"" << y << "\" width=\"" << cell_px
          << "\" height=\"" << cell_px << "\" fill=\"rgb(" << red << ',' << other << ','
          << other << ")\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

namespace {

std::vector<Sighting> to_sightings(std::span<const ProbeEvent> events,
                                   const Deployment& deployment) {
  std::vector<Sighting> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    const SensorNode& node = deployment.node(e.sensor_id);
    out.push_back(Sighting{e.sensor_id, node.position, e.rssi, e.t, e.anon_id});
  }
  return out;
}

}  // namespace

std::vector<PositionFix> locate_stream(std::span<const ProbeEvent> events,
                                       const Deployment& deployment,
                                       const PathLossParams& params,
                                       std::int64_t window_s) {
  if (window_s <= 0) throw RangeError("fix window must be positive");
  auto sightings = to_sightings(events, deployment);
  std::sort(sightings.begin(), sightings.end(), [](const Sighting& a, const Sighting& b) {
    if (a.anon_id != b.anon_id) return a.anon_id < b.anon_id;
    return a.t < b.t;
  });
  std::vector<PositionFix> fixes;
  std::size_t i = 0;
  while (i < sightings.size()) {
    // Tumbling windows aligned to window_s, per device.
    const std::string& id = sightings[i].anon_id;
    std::int64_t window_start = (sightings[i].t / window_s) * window_s;
    std::size_t j = i;
    while (j < sightings.size() && sightings[j].anon_id == id &&
           sightings[j].t < window_start + window_s) {
      ++j;
    }
    fixes.push_back(weighted_centroid(
        std::span<const Sighting>(sightings.data() + i, j - i), params));
    i = j;
  }
  std::sort(fixes.begin(), fixes.end(), [](const PositionFix& a, const PositionFix& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.anon_id < b.anon_id;
  });
  return fixes;
}

std::vector<PresenceVerdict> presence_stream(std::span<const ProbeEvent> events,
                                             const Deployment& deployment,
                                             const PresenceParams& params) {
  if (params.epoch_s <= 0) throw RangeError("epoch length must be positive");
  auto sightings = to_sightings(events, deployment);
  std::map<std::pair<std::string, std::int64_t>, std::vector<Sighting>> groups;
  for (auto& s : sightings) {
    std::int64_t epoch = bucket_of(s.t, params.epoch_s).start;
    groups[{s.anon_id, epoch}].push_back(std::move(s));
  }
  std::vector<PresenceVerdict> verdicts;
  verdicts.reserve(groups.size());
  for (const auto& [key, group] : groups) {
    verdicts.push_back(detect_presence(group, key.first,
                                       Interval{key.second, params.epoch_s}, params));
  }
  std::sort(verdicts.begin(), verdicts.end(),
            [](const PresenceVerdict& a, const PresenceVerdict& b) {
              if (a.epoch.start != b.epoch.start) return a.epoch.start < b.epoch.start;
              return a.anon_id < b.anon_id;
            });
  return verdicts;
}

std::string format_verdict(const PresenceVerdict& v) {
  detail::ordered_json j;
  j["id"] = v.anon_id;
  j["epoch"] = v.epoch.start;
  j["len"] = v.epoch.length_s;
  j["inside"] = v.inside;
  j["nodes"] = v.supporting_nodes;
  return j.dump();
}

PresenceVerdict parse_verdict(std::string_view line) {
  auto j = detail::parse_json(std::string(line), "presence verdict");
  PresenceVerdict v;
  v.anon_id = j.at("id").get<std::string>();
  v.epoch.start = j.at("epoch").get<std::int64_t>();
  v.epoch.length_s = j.at("len").get<std::int64_t>();
  v.inside = j.at("inside").get<bool>();
  v.supporting_nodes = j.at("nodes").get<int>();
  return v;
}

std::string format_fix(const PositionFix& f) {
  detail::ordered_json j;
  j["id"] = f.anon_id;
  j["t"] = f.t;
  j["x"] = f.point.x;
  j["y"] = f.point.y;
  j["nodes"] = f.n_nodes_used;
  return j.dump();
}

PositionFix parse_fix(std::string_view line) {
  auto j = detail::parse_json(std::string(line), "position fix");
  PositionFix f;
  f.anon_id = j.at("id").get<std::string>();
  f.t = j.at("t").get<std::int64_t>();
  f.point.x = j.at("x").get<double>();
  f.point.y = j.at("y").get<double>();
  f.n_nodes_used = j.at("nodes").get<int>();
  return f;
}

}  // namespace crowdsense
