#include "crowdsense/pipeline.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "crowdsense/aggregate.hpp"
#include "crowdsense/analytics.hpp"
#include "crowdsense/anonymize.hpp"
#include "crowdsense/calibrate.hpp"
#include "crowdsense/errors.hpp"
#include "crowdsense/ingest.hpp"
#include "crowdsense/semantics.hpp"
#include "charts.hpp"
#include "json_util.hpp"

namespace crowdsense {

namespace fs = std::filesystem;
using detail::ordered_json;

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

std::string sha256_hex(const std::string& data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::string hex(64, '0');
  for (int i = 0; i < SHA256_DIGEST_LENGTH; ++i) {
    hex[i * 2] = kHexDigits[digest[i] >> 4];
    hex[i * 2 + 1] = kHexDigits[digest[i] & 0xf];
  }
  return hex;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.origin = detail::point_from_json(j.at("origin"), "grid.origin");
  g.cell_size_m = j.at("cell_m").get<double>();
  g.rows = j.at("rows").get<int>();
  g.cols = j.at("cols").get<int>();
  return g;
}

ordered_json grid_to_json(const GridSpec& g) {
  ordered_json j;
  j["origin"] = detail::point_to_json(g.origin);
  j["cell_m"] = g.cell_size_m;
  j["rows"] = g.rows;
  j["cols"] = g.cols;
  return j;
}

}  // namespace

RunManifest RunManifest::from_json(const std::string& text) {
  auto j = detail::parse_json(text, "manifest");
  RunManifest m;
  m.deployment_path = j.at("deployment").get<std::string>();
  m.mode = j.value("mode", "cmas");
  if (m.mode != "cmas" && m.mode != "ccls") {
    throw ConfigError("manifest mode must be 'cmas' or 'ccls'");
  }
  for (const auto& p : j.value("probes", nlohmann::json::array())) {
    m.probe_paths.push_back(p.get<std::string>());
  }
  for (const auto& p : j.value("raw_probes", nlohmann::json::array())) {
    m.raw_probe_paths.push_back(p.get<std::string>());
  }
  for (const auto& p : j.value("cameras", nlohmann::json::array())) {
    m.camera_paths.push_back(p.get<std::string>());
  }
  m.out_dir = j.at("out").get<std::string>();
  for (const auto& s : j.value("stages", nlohmann::json::array())) {
    m.stages.push_back(s.get<std::string>());
  }
  m.interval_s = j.value("interval_s", std::int64_t{300});
  m.tolerance_s = j.value("tolerance_s", std::int64_t{60});
  m.alpha = j.value("alpha", 0.3);
  m.max_gap_s = j.value("max_gap_s", std::int64_t{300});
  m.gap_tolerance_s = j.value("gap_tolerance_s", std::int64_t{120});
  m.waiting_threshold_s = j.value("waiting_threshold_s", std::int64_t{300});
  if (j.contains("path_loss")) {
    const auto& pl = j.at("path_loss");
    m.path_loss.p0 = pl.value("p0", -40.0);
    m.path_loss.n = pl.value("n", 2.0);
    m.path_loss.g = pl.value("g", 2.0);
  }
  if (j.contains("presence")) {
    const auto& pr = j.at("presence");
    m.presence.min_nodes = pr.value("min_nodes", 6);
    m.presence.rssi_min = pr.value("rssi_min", -75);
    m.presence.epoch_s = pr.value("epoch_s", std::int64_t{60});
  }
  m.fix_window_s = j.value("fix_window_s", std::int64_t{10});
  if (j.contains("grid")) m.grid = grid_from_json(j.at("grid"));
  m.session_period_s = j.value("session_period_s", std::int64_t{86400});
  if (j.contains("key_seed")) m.key_seed = j.at("key_seed").get<std::uint64_t>();
  if (!divides_hour(m.interval_s)) throw ConfigError("interval_s must divide 3600");
  return m;
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string RunManifest::to_json() const {
  ordered_json j;
  j["deployment"] = deployment_path;
  j["mode"] = mode;
  j["probes"] = probe_paths;
  j["raw_probes"] = raw_probe_paths;
  j["cameras"] = camera_paths;
  j["out"] = out_dir;
  j["stages"] = stages;
  j["interval_s"] = interval_s;
  j["tolerance_s"] = tolerance_s;
  j["alpha"] = alpha;
  j["max_gap_s"] = max_gap_s;
  j["gap_tolerance_s"] = gap_tolerance_s;
  j["waiting_threshold_s"] = waiting_threshold_s;
  ordered_json pl;
  pl["p0"] = path_loss.p0;
  pl["n"] = path_loss.n;
  pl["g"] = path_loss.g;
  j["path_loss"] = std::move(pl);
  ordered_json pr;
  pr["min_nodes"] = presence.min_nodes;
  pr["rssi_min"] = presence.rssi_min;
  pr["epoch_s"] = presence.epoch_s;
  j["presence"] = std::move(pr);
  j["fix_window_s"] = fix_window_s;
  if (grid) j["grid"] = grid_to_json(*grid);
  j["session_period_s"] = session_period_s;
  if (key_seed) j["key_seed"] = *key_seed;
  return j.dump(2) + "\n";
}

std::string RunManifest::config_digest() const { return sha256_hex(to_json()); }

namespace {

struct DeadLetter {
  std::string reason;
  std::string line;
};

struct ClusterSummary {
  // hour -> summed per-sensor hourly means (device series, Fig 5a shape)
  std::map<std::int64_t, double> hourly_devices;
  // hour -> median interval ratio (Fig 5b shape)
  std::map<std::int64_t, double> hourly_ratio;
  // epoch -> inside device count (ccls)
  std::map<std::int64_t, std::int64_t> occupancy;
};

class ClusterWorker {
 public:
  ClusterWorker(const RunManifest& manifest, const Deployment& deployment,
                const std::string& cluster_id)
      : m_(manifest), dep_(deployment), cluster_id_(cluster_id) {
    dir_ = fs::path(m_.out_dir) / "clusters" / cluster_id_;
    for (const auto& member : dep_.find_cluster(cluster_id_)->members) {
      const SensorNode& node = dep_.node(member);
      if (node.kind == NodeKind::WifiSniffer) sniffer_ids_.insert(node.id);
    }
  }

  ClusterOutcome process(ClusterSummary& summary) {
    ClusterOutcome outcome;
    outcome.cluster_id = cluster_id_;
    std::string stage = "setup";
    try {
      fs::create_directories(dir_);
      stage = "ingest";
      if (enabled(stage)) ingest();
      if (m_.mode == "cmas") {
        stage = "aggregate";
        if (enabled(stage)) aggregate_stage();
        stage = "calibrate";
        if (enabled(stage)) calibrate_stage();
        stage = "estimate";
        if (enabled(stage)) estimate_stage();
        stage = "flows";
        if (enabled(stage)) flows_stage();
        stage = "stay";
        if (enabled(stage)) stay_stage();
        stage = "annotate";
        if (enabled(stage)) annotate_cmas();
      } else {
        stage = "presence";
        if (enabled(stage)) presence_stage();
        stage = "locate";
        if (enabled(stage)) locate_stage();
        stage = "heatmap";
        if (enabled(stage)) heatmap_stage();
        stage = "annotate";
        if (enabled(stage)) annotate_ccls();
      }
      summary = std::move(summary_);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.failed_stage = stage;
      outcome.error = e.what();
    }
    return outcome;
  }

 private:
  const RunManifest& m_;
  const Deployment& dep_;
  std::string cluster_id_;
  fs::path dir_;
  std::set<std::string> sniffer_ids_;

  std::vector<ProbeEvent> events_;
  std::vector<CameraTick> ticks_;
  std::vector<IntervalCount> counts_;
  std::vector<CalibrationRatio> ratios_;
  RatioProfile profile_;
  std::vector<CrowdEstimate> estimates_;
  std::vector<FlowRecord> flows_;
  std::vector<StayStats> stays_;
  std::vector<PresenceVerdict> verdicts_;
  std::vector<PositionFix> fixes_;
  ClusterSummary summary_;

  bool enabled(const std::string& stage) const {
    return m_.stages.empty() ||
           std::find(m_.stages.begin(), m_.stages.end(), stage) != m_.stages.end();
  }

  bool mine(const std::string& sensor_id) const {
    return sniffer_ids_.contains(sensor_id);
  }

  void ingest() {
    EventParser parser(dep_);
    std::vector<DeadLetter> dead;
    std::vector<std::vector<ProbeEvent>> streams;

    for (const auto& path : m_.probe_paths) {
      std::vector<ProbeEvent> stream;
      for_each_line(path, [&](std::string_view line) {
        try {
          ProbeEvent e = parser.parse_probe(line);
          if (mine(e.sensor_id)) stream.push_back(std::move(e));
        } catch (const Error& err) {
          dead.push_back(DeadLetter{err.what(), std::string(line)});
        }
      });
      streams.push_back(std::move(stream));
    }

    if (!m_.raw_probe_paths.empty()) {
      KeyMaterialFn material =
          m_.key_seed ? seeded_key_material(*m_.key_seed) : KeyMaterialFn(secure_random);
      KeyRotator rotator(m_.session_period_s, std::move(material));
      for (const auto& path : m_.raw_probe_paths) {
        std::vector<ProbeEvent> stream;
        for_each_line(path, [&](std::string_view line) {
          try {
            RawProbeEvent raw = parser.parse_raw_probe(line);
            if (!mine(raw.sensor_id)) return;
            ProbeEvent e;
            e.sensor_id = raw.sensor_id;
            e.anon_id =
                derive_anon_id(MacAddress::parse(raw.mac), rotator.key_at(raw.t)).hex;
            e.t = raw.t;
            e.rssi = raw.rssi;
            e.seq = raw.seq;
            stream.push_back(std::move(e));
          } catch (const Error& err) {
            dead.push_back(DeadLetter{err.what(), std::string(line)});
          }
        });
        streams.push_back(std::move(stream));
      }
    }

    MergeResult merged = merge_sorted(std::move(streams), m_.tolerance_s);
    events_ = std::move(merged.ordered);
    for (const auto& e : merged.dead_letter) {
      dead.push_back(DeadLetter{"out of order beyond tolerance", format_probe(e)});
    }
    std::string dead_text;
    for (const auto& d : dead) {
      ordered_json j;
      j["reason"] = d.reason;
      j["line"] = d.line;
      dead_text += j.dump();
      dead_text += '\n';
    }
    write_file(dir_ / "dead_letter.ndjson", dead_text);

    // Camera ticks for this cluster's chokes (cmas only).
    if (m_.mode == "cmas") {
      EventParser cam_parser(dep_);
      for (const auto& path : m_.camera_paths) {
        for_each_line(path, [&](std::string_view line) {
          try {
            CameraTick tick = cam_parser.parse_camera(line);
            if (dep_.cluster_of(tick.camera_id) == cluster_id_) {
              ticks_.push_back(std::move(tick));
            }
          } catch (const Error&) {
            // Camera junk is not this cluster's concern unless attributable.
          }
        });
      }
      std::sort(ticks_.begin(), ticks_.end(), [](const CameraTick& a, const CameraTick& b) {
        if (a.interval.start != b.interval.start) {
          return a.interval.start < b.interval.start;
        }
        return a.camera_id < b.camera_id;
      });
    }
  }

  void aggregate_stage() {
    Aggregator aggregator(m_.interval_s);
    for (const auto& e : events_) aggregator.add(e);
    counts_ = aggregator.finish();
    std::string text;
    for (const auto& c : counts_) {
      text += format_interval_count(c);
      text += '\n';
    }
    write_file(dir_ / "counts.ndjson", text);

    auto hourly = hourly_rollups(counts_);
    std::string htext;
    for (const auto& h : hourly) {
      htext += format_hourly_count(h);
      htext += '\n';
      summary_.hourly_devices[h.hour_start] += h.mean_unique;
    }
    write_file(dir_ / "hourly.ndjson", htext);
  }

  // Choke-point id -> its sniffer's counts and its camera's ticks, paired by
  // interval; one adaptive ratio per cluster.
  void calibrate_stage() {
    auto chokes = dep_.choke_points(cluster_id_);
    std::map<std::pair<std::string, std::int64_t>, const IntervalCount*> count_at;
    for (const auto& c : counts_) {
      count_at[{c.sensor_id, c.interval.start}] = &c;
    }
    for (const auto& tick : ticks_) {
      for (const auto* choke : chokes) {
        if (tick.camera_id != choke->camera_id && tick.camera_id != choke->id) continue;
        auto it = count_at.find({choke->sniffer_id, tick.interval.start});
        if (it == count_at.end() || it->second->unique_devices == 0) {
          continue;  // ratio undefined for the interval; skipped, never zeroed
        }
        ratios_.push_back(compute_ratio(tick, *it->second, choke->id));
      }
    }
    std::sort(ratios_.begin(), ratios_.end(),
              [](const CalibrationRatio& a, const CalibrationRatio& b) {
                if (a.interval.start != b.interval.start) {
                  return a.interval.start < b.interval.start;
                }
                return a.choke_point_id < b.choke_point_id;
              });
    std::string text;
    for (const auto& r : ratios_) {
      text += format_ratio(r);
      text += '\n';
    }
    write_file(dir_ / "ratios.ndjson", text);

    for (const auto& h : hourly_ratios(ratios_)) {
      summary_.hourly_ratio[h.hour_start] = h.ratio;
    }
  }

  void estimate_stage() {
    profile_ = learn_profile(ratios_, cluster_id_);
    write_file(dir_ / "profile.json", format_profile(profile_) + "\n");

    std::set<std::string> choke_sniffers;
    std::map<std::pair<std::string, std::int64_t>, const CameraTick*> tick_at;
    for (const auto* choke : dep_.choke_points(cluster_id_)) {
      choke_sniffers.insert(choke->sniffer_id);
      for (const auto& tick : ticks_) {
        if (tick.camera_id == choke->camera_id || tick.camera_id == choke->id) {
          tick_at[{choke->sniffer_id, tick.interval.start}] = &tick;
        }
      }
    }
    std::set<std::int64_t> camera_active;
    for (const auto& tick : ticks_) camera_active.insert(tick.interval.start);

    std::map<std::int64_t, std::vector<const CalibrationRatio*>> ratio_at;
    for (const auto& r : ratios_) ratio_at[r.interval.start].push_back(&r);

    // Counts are (sensor, interval)-sorted; estimates follow time order so
    // the adaptive ratio is causal.
    std::vector<const IntervalCount*> by_time;
    by_time.reserve(counts_.size());
    for (const auto& c : counts_) by_time.push_back(&c);
    std::sort(by_time.begin(), by_time.end(),
              [](const IntervalCount* a, const IntervalCount* b) {
                if (a->interval.start != b->interval.start) {
                  return a->interval.start < b->interval.start;
                }
                return a->sensor_id < b->sensor_id;
              });

    AdaptiveRatio adaptive(m_.alpha);
    std::int64_t applied_until = std::numeric_limits<std::int64_t>::min();
    for (const IntervalCount* count : by_time) {
      std::int64_t start = count->interval.start;
      if (start > applied_until) {
        for (const auto* r : ratio_at[start]) adaptive.observe(*r);
        applied_until = start;
      }
      if (auto it = tick_at.find({count->sensor_id, start}); it != tick_at.end()) {
        estimates_.push_back(CrowdEstimate{
            count->sensor_id, count->interval,
            static_cast<double>(it->second->count_in + it->second->count_out),
            EstimateMethod::ChokePointDirect});
        continue;
      }
      if (camera_active.contains(start) && adaptive.primed()) {
        estimates_.push_back(
            estimate_crowd(*count, adaptive.value(), EstimateMethod::RatioExtrapolated));
        continue;
      }
      int hour = hour_of_day(start);
      if (profile_.usable(hour)) {
        estimates_.push_back(estimate_crowd(*count, profile_.ratio_at(hour),
                                            EstimateMethod::ProfileExtrapolated));
      }
      // Neither live ratio nor usable profile hour: no estimate is emitted.
    }
    std::sort(estimates_.begin(), estimates_.end(),
              [](const CrowdEstimate& a, const CrowdEstimate& b) {
                if (a.interval.start != b.interval.start) {
                  return a.interval.start < b.interval.start;
                }
                return a.area_id < b.area_id;
              });
    std::string text;
    for (const auto& e : estimates_) {
      text += format_estimate(e);
      text += '\n';
    }
    write_file(dir_ / "estimates.ndjson", text);
  }

  void flows_stage() {
    flows_ = infer_flows(events_, dep_, m_.max_gap_s, m_.interval_s);
    std::string text;
    for (const auto& f : flows_) {
      text += format_flow(f);
      text += '\n';
    }
    write_file(dir_ / "flows.ndjson", text);
  }

  void stay_stage() {
    for (const auto& sensor_id : sniffer_ids_) {
      auto series = stay_series(events_, sensor_id, m_.interval_s, m_.gap_tolerance_s,
                                m_.waiting_threshold_s);
      stays_.insert(stays_.end(), series.begin(), series.end());
    }
    std::string text;
    for (const auto& s : stays_) {
      text += format_stay(s);
      text += '\n';
    }
    write_file(dir_ / "stay.ndjson", text);
  }

  void annotate_cmas() {
    std::string text;
    for (const auto& e : estimates_) {
      text += encode(annotate_estimate(e, dep_));
      text += '\n';
    }
    for (const auto& f : flows_) {
      text += encode(annotate_flow(f, dep_));
      text += '\n';
    }
    for (const auto& s : stays_) {
      for (const auto& o : annotate_stay(s, dep_)) {
        text += encode(o);
        text += '\n';
      }
    }
    write_file(dir_ / "observations.ndjson", text);
  }

  void presence_stage() {
    verdicts_ = presence_stream(events_, dep_, m_.presence);
    std::string text;
    for (const auto& v : verdicts_) {
      text += format_verdict(v);
      text += '\n';
      if (v.inside) ++summary_.occupancy[v.epoch.start];
    }
    write_file(dir_ / "presence.ndjson", text);
    // Epochs with zero inside devices still appear in the series.
    for (const auto& v : verdicts_) summary_.occupancy.try_emplace(v.epoch.start, 0);
  }

  void locate_stage() {
    std::set<std::pair<std::string, std::int64_t>> inside;
    for (const auto& v : verdicts_) {
      if (v.inside) inside.insert({v.anon_id, v.epoch.start});
    }
    std::vector<ProbeEvent> inside_events;
    for (const auto& e : events_) {
      if (inside.contains({e.anon_id, bucket_of(e.t, m_.presence.epoch_s).start})) {
        inside_events.push_back(e);
      }
    }
    fixes_ = locate_stream(inside_events, dep_, m_.path_loss, m_.fix_window_s);
    std::string text;
    for (const auto& f : fixes_) {
      text += format_fix(f);
      text += '\n';
    }
    write_file(dir_ / "fixes.ndjson", text);
  }

  GridSpec default_grid() const {
    // Region named after the cluster, else the node bounding box.
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    bool first = true;
    auto widen = [&](const Point& p) {
      if (first) {
        min_x = max_x = p.x;
        min_y = max_y = p.y;
        first = false;
      } else {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
      }
    };
    if (const Region* region = dep_.find_region(cluster_id_)) {
      if (const auto* rect = std::get_if<Rectangle>(&region->coverage.shape())) {
        widen(rect->min);
        widen(rect->max);
      } else if (const auto* poly = std::get_if<Polygon>(&region->coverage.shape())) {
        for (const auto& v : poly->vertices) widen(v);
      } else if (const auto* circle = std::get_if<Circle>(&region->coverage.shape())) {
        widen({circle->center.x - circle->radius_m, circle->center.y - circle->radius_m});
        widen({circle->center.x + circle->radius_m, circle->center.y + circle->radius_m});
      } else {
        widen(region->position);
      }
    } else {
      for (const auto& id : sniffer_ids_) widen(dep_.node(id).position);
    }
    GridSpec g;
    g.cell_size_m = 2.0;
    g.origin = Point{min_x, min_y};
    g.cols = std::max(1, static_cast<int>(std::ceil((max_x - min_x) / g.cell_size_m)));
    g.rows = std::max(1, static_cast<int>(std::ceil((max_y - min_y) / g.cell_size_m)));
    return g;
  }

  void heatmap_stage() {
    GridSpec spec = m_.grid ? *m_.grid : default_grid();
    HeatGrid grid = heatmap(fixes_, spec);
    write_file(dir_ / "heatmap_grid.txt", heatgrid_to_text(grid));
    write_file(dir_ / "heatmap.svg", heatgrid_to_svg(grid));
    write_file(dir_ / "heatmap.pgm", heatgrid_to_pgm(grid));
  }

  void annotate_ccls() {
    std::string text;
    bool resolvable = dep_.find_region(cluster_id_) || dep_.find_node(cluster_id_);
    for (const auto& [epoch, inside] : summary_.occupancy) {
      if (!resolvable) break;
      CrowdEstimate estimate{cluster_id_,
                             Interval{epoch, m_.presence.epoch_s},
                             static_cast<double>(inside),
                             EstimateMethod::ChokePointDirect};
      text += encode(annotate_estimate(estimate, dep_));
      text += '\n';
    }
    write_file(dir_ / "observations.ndjson", text);
  }
};

void assemble_report(const RunManifest& manifest,
                     const std::map<std::string, ClusterSummary>& summaries) {
  fs::path report_dir = fs::path(manifest.out_dir) / "report";
  fs::create_directories(report_dir);

  auto tsv_and_chart = [&](const char* stem, const char* value_name,
                           auto member_fn, double x_scale) {
    std::set<std::int64_t> keys;
    for (const auto& [cid, s] : summaries) {
      for (const auto& [k, v] : member_fn(s)) keys.insert(k);
    }
    std::ostringstream tsv;
    tsv << "t";
    for (const auto& [cid, s] : summaries) tsv << '\t' << cid;
    tsv << '\n';
    std::vector<detail::Series> series;
    for (const auto& [cid, s] : summaries) {
      series.push_back(detail::Series{cid, {}});
    }
    for (std::int64_t k : keys) {
      tsv << k;
      std::size_t idx = 0;
      for (const auto& [cid, s] : summaries) {
        const auto& map = member_fn(s);
        auto it = map.find(k);
        tsv << '\t';
        if (it != map.end()) {
          tsv << it->second;
          series[idx].points.push_back({static_cast<double>(k) / x_scale,
                                        static_cast<double>(it->second)});
        }
        ++idx;
      }
      tsv << '\n';
    }
    write_file(report_dir / (std::string(stem) + ".tsv"), tsv.str());
    write_file(report_dir / (std::string(stem) + ".svg"),
               detail::line_chart_svg(value_name, "hours since epoch", value_name,
                                      series));
  };

  if (manifest.mode == "cmas") {
    tsv_and_chart("hourly_devices", "unique devices (hourly mean)",
                  [](const ClusterSummary& s) -> const std::map<std::int64_t, double>& {
                    return s.hourly_devices;
                  },
                  3600.0);
    tsv_and_chart("hourly_ratios", "camera/wifi ratio (hourly median)",
                  [](const ClusterSummary& s) -> const std::map<std::int64_t, double>& {
                    return s.hourly_ratio;
                  },
                  3600.0);
  } else {
    std::set<std::int64_t> keys;
    for (const auto& [cid, s] : summaries) {
      for (const auto& [k, v] : s.occupancy) keys.insert(k);
    }
    std::ostringstream tsv;
    tsv << "epoch";
    for (const auto& [cid, s] : summaries) tsv << '\t' << cid;
    tsv << '\n';
    std::vector<detail::Series> series;
    for (const auto& [cid, s] : summaries) series.push_back(detail::Series{cid, {}});
    for (std::int64_t k : keys) {
      tsv << k;
      std::size_t idx = 0;
      for (const auto& [cid, s] : summaries) {
        auto it = s.occupancy.find(k);
        tsv << '\t';
        if (it != s.occupancy.end()) {
          tsv << it->second;
          series[idx].points.push_back(
              {static_cast<double>(k), static_cast<double>(it->second)});
        }
        ++idx;
      }
      tsv << '\n';
    }
    write_file(report_dir / "occupancy.tsv", tsv.str());
    write_file(report_dir / "occupancy.svg",
               detail::line_chart_svg("inside devices per epoch", "epoch",
                                      "devices inside", series));
  }
}

}  // namespace

RunReport run(const RunManifest& manifest) {
  Deployment deployment = Deployment::load(manifest.deployment_path);
  fs::create_directories(manifest.out_dir);
  write_file(fs::path(manifest.out_dir) / "manifest_digest.txt",
             manifest.config_digest() + "\n");

  std::vector<std::string> cluster_ids;
  for (const auto& [cid, cluster] : deployment.clusters()) cluster_ids.push_back(cid);
  std::sort(cluster_ids.begin(), cluster_ids.end());

  // One logical worker per cluster; clusters share no state, so the report
  // is identical whatever the execution order.
  std::vector<std::future<std::pair<ClusterOutcome, ClusterSummary>>> futures;
  for (const auto& cid : cluster_ids) {
    futures.push_back(std::async(std::launch::async, [&, cid]() {
      ClusterWorker worker(manifest, deployment, cid);
      ClusterSummary summary;
      ClusterOutcome outcome = worker.process(summary);
      return std::make_pair(std::move(outcome), std::move(summary));
    }));
  }

  RunReport report;
  report.out_dir = manifest.out_dir;
  std::map<std::string, ClusterSummary> summaries;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    auto [outcome, summary] = futures[i].get();
    if (outcome.ok) summaries.emplace(cluster_ids[i], std::move(summary));
    report.clusters.push_back(std::move(outcome));
  }
  assemble_report(manifest, summaries);
  return report;
}

}  // namespace crowdsense
