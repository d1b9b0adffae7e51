#include "crowdsense/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <iostream>
#include <limits>
#include <queue>

#include "crowdsense/anonymize.hpp"
#include "crowdsense/errors.hpp"
#include "json_util.hpp"

namespace crowdsense {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  return *it;
}

std::int64_t int_field(const nlohmann::json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) {
    throw ParseError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string str_field(const nlohmann::json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) {
    throw ParseError(std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

void check_probe_ranges(std::int64_t /*t*/, int rssi, int seq) {
  if (rssi < -100 || rssi > 0) {
    throw RangeError("rssi " + std::to_string(rssi) + " outside [-100, 0]");
  }
  if (seq < 0 || seq > 4095) {
    throw RangeError("seq " + std::to_string(seq) + " outside [0, 4095]");
  }
}

ProbeEvent EventParser::parse_probe(std::string_view line) const {
  auto j = detail::parse_json(std::string(line), "probe");
  ProbeEvent e;
  e.sensor_id = str_field(j, "s");
  e.anon_id = str_field(j, "id");
  e.t = int_field(j, "t");
  e.rssi = static_cast<int>(int_field(j, "rssi"));
  e.seq = static_cast<int>(int_field(j, "seq"));
  check_probe_ranges(e.t, e.rssi, e.seq);
  if (!is_hex_digest(e.anon_id)) {
    throw ParseError("probe id is not a 64-char lowercase hex digest");
  }
  deployment_->node(e.sensor_id);
  return e;
}

RawProbeEvent EventParser::parse_raw_probe(std::string_view line) const {
  auto j = detail::parse_json(std::string(line), "raw probe");
  RawProbeEvent e;
  e.sensor_id = str_field(j, "s");
  e.mac = str_field(j, "mac");
  e.t = int_field(j, "t");
  e.rssi = static_cast<int>(int_field(j, "rssi"));
  e.seq = static_cast<int>(int_field(j, "seq"));
  check_probe_ranges(e.t, e.rssi, e.seq);
  MacAddress::parse(e.mac);  // validate early
  deployment_->node(e.sensor_id);
  return e;
}

CameraTick EventParser::parse_camera(std::string_view line) const {
  auto j = detail::parse_json(std::string(line), "camera tick");
  CameraTick t;
  t.camera_id = str_field(j, "c");
  t.interval.start = int_field(j, "start");
  t.interval.length_s = int_field(j, "len");
  t.count_in = int_field(j, "in");
  t.count_out = int_field(j, "out");
  if (t.interval.length_s <= 0) {
    throw RangeError("camera tick interval length must be positive");
  }
  if (t.count_in < 0 || t.count_out < 0) {
    throw RangeError("camera counts must be non-negative");
  }
  const SensorNode& node = deployment_->node(t.camera_id);
  if (node.kind != NodeKind::StereoCamera &&
      node.kind != NodeKind::CalibrationChokePoint) {
    throw UnknownSensorError("'" + t.camera_id + "' is not a camera");
  }
  return t;
}

std::string format_probe(const ProbeEvent& e) {
  detail::ordered_json j;
  j["s"] = e.sensor_id;
  j["id"] = e.anon_id;
  j["t"] = e.t;
  j["rssi"] = e.rssi;
  j["seq"] = e.seq;
  return j.dump();
}

std::string format_raw_probe(const RawProbeEvent& e) {
  detail::ordered_json j;
  j["s"] = e.sensor_id;
  j["mac"] = e.mac;
  j["t"] = e.t;
  j["rssi"] = e.rssi;
  j["seq"] = e.seq;
  return j.dump();
}

std::string format_camera(const CameraTick& t) {
  detail::ordered_json j;
  j["c"] = t.camera_id;
  j["start"] = t.interval.start;
  j["len"] = t.interval.length_s;
  j["in"] = t.count_in;
  j["out"] = t.count_out;
  return j.dump();
}

MergeResult merge_sorted(std::vector<std::vector<ProbeEvent>> streams,
                         std::int64_t tolerance_s) {
  MergeResult result;

  // Pass 1: per-stream reorder within the tolerance window. An event older
  // than (max time seen in its stream - tolerance) missed its window.
  for (auto& stream : streams) {
    std::int64_t max_seen = std::numeric_limits<std::int64_t>::min();
    std::vector<ProbeEvent> kept;
    kept.reserve(stream.size());
    for (auto& e : stream) {
      if (max_seen != std::numeric_limits<std::int64_t>::min() &&
          e.t < max_seen - tolerance_s) {
        result.dead_letter.push_back(std::move(e));
        continue;
      }
      max_seen = std::max(max_seen, e.t);
      kept.push_back(std::move(e));
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const ProbeEvent& a, const ProbeEvent& b) { return a.t < b.t; });
    stream = std::move(kept);
  }

  // Pass 2: exact k-way merge of the now-sorted streams.
  struct Head {
    std::int64_t t;
    std::size_t stream;
    std::size_t index;
  };
  auto cmp = [](const Head& a, const Head& b) {
    return a.t != b.t ? a.t > b.t : a.stream > b.stream;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(cmp)> heap(cmp);
  std::size_t total = 0;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    total += streams[s].size();
    if (!streams[s].empty()) heap.push({streams[s][0].t, s, 0});
  }
  result.ordered.reserve(total);
  while (!heap.empty()) {
    Head h = heap.top();
    heap.pop();
    result.ordered.push_back(std::move(streams[h.stream][h.index]));
    if (h.index + 1 < streams[h.stream].size()) {
      heap.push({streams[h.stream][h.index + 1].t, h.stream, h.index + 1});
    }
  }
  return result;
}

struct LineReader::Impl {
  gzFile file = nullptr;
  bool from_stdin = false;
  std::string buffer;
};

LineReader::LineReader(const std::string& path) : impl_(std::make_unique<Impl>()) {
  if (path == "-") {
    impl_->from_stdin = true;
    return;
  }
  impl_->file = gzopen(path.c_str(), "rb");
  if (!impl_->file) {
    throw IoError("cannot open input: " + path);
  }
}

LineReader::~LineReader() {
  if (impl_ && impl_->file) gzclose(impl_->file);
}

bool LineReader::next(std::string& line) {
  if (impl_->from_stdin) {
    if (!std::getline(std::cin, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  line.clear();
  char chunk[4096];
  for (;;) {
    if (gzgets(impl_->file, chunk, sizeof(chunk)) == nullptr) {
      return !line.empty();
    }
    line += chunk;
    if (!line.empty() && line.back() == '\n') {
      line.pop_back();
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void for_each_line(const std::string& path,
                   const std::function<void(std::string_view)>& fn) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (!line.empty()) fn(line);
  }
}

}  // namespace crowdsense
