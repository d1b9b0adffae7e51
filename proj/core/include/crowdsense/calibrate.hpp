#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdsense/aggregate.hpp"
#include "crowdsense/events.hpp"

namespace crowdsense {

/// Camera/Wi-Fi ratio at a calibration choke point for one interval:
/// (count-in + count-out) / unique Wi-Fi devices.
struct CalibrationRatio {
  std::string choke_point_id;
  Interval interval;
  double ratio = 0.0;

  friend bool operator==(const CalibrationRatio&, const CalibrationRatio&) = default;
};

/// Hour-of-day ratio profile learned over several days. Hours with no
/// defined ratios are unusable.
struct RatioProfile {
  std::string cluster_id;
  std::array<std::optional<double>, 24> profile_ratio{};
  std::array<int, 24> support{};  // contributing day count per hour

  bool usable(int hour) const { return profile_ratio[hour].has_value(); }

  /// Throws NoRatioAvailableError for unusable hours.
  double ratio_at(int hour) const;
};

enum class EstimateMethod {
  ChokePointDirect,
  RatioExtrapolated,
  ProfileExtrapolated,
};

struct CrowdEstimate {
  std::string area_id;
  Interval interval;
  double people = 0.0;
  EstimateMethod method = EstimateMethod::RatioExtrapolated;

  friend bool operator==(const CrowdEstimate&, const CrowdEstimate&) = default;
};

/// Ratio for one choke-point interval. The tick and count must refer to the
/// same choke point's camera and sniffer and the same interval. Throws
/// ZeroWifiCountError when no devices were seen (the ratio is undefined for
/// that interval and the interval must be skipped, not coerced to zero).
CalibrationRatio compute_ratio(const CameraTick& tick, const IntervalCount& count,
                               const std::string& choke_point_id);

/// Exponentially weighted update: new = (1 - alpha) * prev + alpha * observed.
/// alpha must lie in (0, 1]; alpha = 1 is memoryless.
double update_adaptive_ratio(double prev, const CalibrationRatio& observed, double alpha);

/// Per-cluster adaptive ratio state. Seeded by the first observation.
class AdaptiveRatio {
 public:
  explicit AdaptiveRatio(double alpha = 0.3);

  void observe(const CalibrationRatio& ratio);
  bool primed() const { return primed_; }
  /// Throws NoRatioAvailableError before the first observation.
  double value() const;

 private:
  double alpha_;
  double value_ = 0.0;
  bool primed_ = false;
};

/// Median per hour-of-day over all defined ratios; support counts the
/// distinct days contributing to each hour.
RatioProfile learn_profile(std::span<const CalibrationRatio> ratios,
                           const std::string& cluster_id);

/// people = ratio * unique_devices.
CrowdEstimate estimate_crowd(const IntervalCount& count, double ratio,
                             EstimateMethod method);

/// Hourly ratio series: median of the defined per-interval ratios within
/// each hour. Used for reporting and as the profile's per-day input.
struct HourlyRatio {
  std::string choke_point_id;
  std::int64_t hour_start = 0;
  double ratio = 0.0;
  int intervals_present = 0;
};
std::vector<HourlyRatio> hourly_ratios(std::span<const CalibrationRatio> ratios);

/// One cluster's full calibration pass: per-interval ratios at its choke
/// points, the learned hour-of-day profile, and causal crowd estimates for
/// every (sensor, interval) count.
///
/// Estimate selection per count, after folding the interval's ratios into
/// the adaptive state: the choke area itself reports the camera total
/// (ChokePointDirect); other areas use the adaptive ratio while the camera
/// is active (RatioExtrapolated) and fall back to the profile hour when it
/// is not (ProfileExtrapolated); with neither, no estimate is emitted.
struct ClusterCalibration {
  std::vector<CalibrationRatio> ratios;  // ordered by (interval, choke)
  RatioProfile profile;
  std::vector<CrowdEstimate> estimates;  // ordered by (interval, area)
};

class Deployment;  // fwd; full definition in deployment.hpp

ClusterCalibration calibrate_cluster(const Deployment& deployment,
                                     const std::string& cluster_id,
                                     std::span<const IntervalCount> counts,
                                     std::span<const CameraTick> ticks,
                                     double alpha = 0.3);

const char* to_string(EstimateMethod method);
EstimateMethod estimate_method_from(std::string_view name);

std::string format_ratio(const CalibrationRatio& r);
CalibrationRatio parse_ratio(std::string_view line);
std::string format_estimate(const CrowdEstimate& e);
CrowdEstimate parse_estimate(std::string_view line);
std::string format_profile(const RatioProfile& p);
RatioProfile parse_profile(std::string_view text);

}  // namespace crowdsense
