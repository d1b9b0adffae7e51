#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdsense/locate.hpp"

namespace crowdsense {

/// Everything one reproducible run needs: inputs, stages and knobs. The
/// config digest of the canonical manifest document pins the run.
struct RunManifest {
  std::string deployment_path;
  std::string mode = "cmas";  // "cmas" or "ccls"
  std::vector<std::string> probe_paths;      // anonymized probe files
  std::vector<std::string> raw_probe_paths;  // raw files, anonymized during ingest
  std::vector<std::string> camera_paths;
  std::string out_dir;
  /// Stage names to run; empty means every stage of the mode.
  std::vector<std::string> stages;

  std::int64_t interval_s = 300;
  std::int64_t tolerance_s = 60;  // ingest reorder window
  double alpha = 0.3;
  std::int64_t max_gap_s = 300;
  std::int64_t gap_tolerance_s = 120;
  std::int64_t waiting_threshold_s = 300;

  PathLossParams path_loss;
  PresenceParams presence;
  std::int64_t fix_window_s = 10;
  std::optional<GridSpec> grid;

  /// Session period for the optional raw-anonymization stage; key material
  /// is drawn from the CSPRNG unless key_seed pins it for reproducibility.
  std::int64_t session_period_s = 86400;
  std::optional<std::uint64_t> key_seed;

  static RunManifest from_json(const std::string& text);
  static RunManifest load(const std::string& path);
  std::string to_json() const;

  /// SHA-256 hex of the canonical manifest document.
  std::string config_digest() const;
};

struct ClusterOutcome {
  std::string cluster_id;
  bool ok = false;
  std::string failed_stage;  // set when !ok
  std::string error;
};

struct RunReport {
  std::vector<ClusterOutcome> clusters;  // ordered by cluster id
  std::string out_dir;

  bool all_ok() const {
    for (const auto& c : clusters) {
      if (!c.ok) return false;
    }
    return true;
  }
};

/// Runs every enabled stage for every cluster (clusters are independent and
/// may run concurrently), then assembles the summary report. Per-cluster
/// results that finished before a failure stay on disk.
///
/// Output layout under manifest.out_dir:
///   manifest_digest.txt
///   clusters/<id>/counts.ndjson hourly.ndjson ratios.ndjson profile.json
///                 estimates.ndjson flows.ndjson stay.ndjson
///                 observations.ndjson dead_letter.ndjson      (cmas)
///   clusters/<id>/presence.ndjson fixes.ndjson occupancy.tsv
///                 heatmap_grid.txt heatmap.svg heatmap.pgm
///                 observations.ndjson dead_letter.ndjson      (ccls)
///   report/hourly_devices.tsv hourly_ratios.tsv *.svg         (cmas)
///   report/occupancy.tsv occupancy.svg                        (ccls)
RunReport run(const RunManifest& manifest);

}  // namespace crowdsense
