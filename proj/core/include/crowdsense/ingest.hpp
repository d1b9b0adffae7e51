#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crowdsense/deployment.hpp"
#include "crowdsense/events.hpp"

namespace crowdsense {

/// Line parsers for the newline-delimited record formats. A parser is bound
/// to a deployment so sensor references are validated at the edge.
class EventParser {
 public:
  explicit EventParser(const Deployment& deployment) : deployment_(&deployment) {}

  /// {"s":"gc-07","id":"<64hex>","t":1521763200,"rssi":-62,"seq":811}
  /// Throws ParseError / RangeError / UnknownSensorError.
  ProbeEvent parse_probe(std::string_view line) const;

  /// {"s":"gc-07","mac":"aa:bb:cc:dd:ee:ff","t":1521763200,"rssi":-62,"seq":811}
  RawProbeEvent parse_raw_probe(std::string_view line) const;

  /// {"c":"gc-cam-1","start":1521763200,"len":300,"in":14,"out":9}
  CameraTick parse_camera(std::string_view line) const;

 private:
  const Deployment* deployment_;
};

std::string format_probe(const ProbeEvent& e);
std::string format_raw_probe(const RawProbeEvent& e);
std::string format_camera(const CameraTick& t);

/// Validates ranges without deployment lookups (used by the anonymize filter,
/// which runs before any deployment is known).
void check_probe_ranges(std::int64_t t, int rssi, int seq);

/// Merges per-sensor streams into one globally time-ordered sequence.
///
/// Each input stream may be locally disordered by at most `tolerance_s`;
/// within that window events are reordered silently. Events arriving later
/// than the window—older than something their own stream already released—
/// go to the dead-letter list instead of being dropped or emitted out of
/// order.
struct MergeResult {
  std::vector<ProbeEvent> ordered;
  std::vector<ProbeEvent> dead_letter;
};
MergeResult merge_sorted(std::vector<std::vector<ProbeEvent>> streams,
                         std::int64_t tolerance_s);

/// Streaming line source; transparently inflates gzip inputs.
class LineReader {
 public:
  /// Opens a file ("-" for stdin). Throws IoError.
  explicit LineReader(const std::string& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  /// Next line without trailing newline; false at end of input.
  bool next(std::string& line);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Reads every line of a (possibly gzipped) file.
std::vector<std::string> read_lines(const std::string& path);

/// Applies `fn` to every line.
void for_each_line(const std::string& path, const std::function<void(std::string_view)>& fn);

}  // namespace crowdsense
