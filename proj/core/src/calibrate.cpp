#include "crowdsense/calibrate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "crowdsense/errors.hpp"
#include "json_util.hpp"

namespace crowdsense {

namespace {

double median(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::int64_t day_of(std::int64_t t) { return t >= 0 ? t / 86400 : (t - 86399) / 86400; }

}  // namespace

double RatioProfile::ratio_at(int hour) const {
  if (hour < 0 || hour > 23) {
    throw RangeError("hour of day outside [0, 23]");
  }
  if (!profile_ratio[hour]) {
    throw NoRatioAvailableError("profile hour " + std::to_string(hour) + " unusable");
  }
  return *profile_ratio[hour];
}

CalibrationRatio compute_ratio(const CameraTick& tick, const IntervalCount& count,
                               const std::string& choke_point_id) {
  if (tick.interval != count.interval) {
    throw RangeError("camera tick and device count cover different intervals");
  }
  if (count.unique_devices == 0) {
    throw ZeroWifiCountError("ratio undefined: zero Wi-Fi devices in interval");
  }
  double people = static_cast<double>(tick.count_in + tick.count_out);
  return CalibrationRatio{choke_point_id, tick.interval,
                          people / static_cast<double>(count.unique_devices)};
}

double update_adaptive_ratio(double prev, const CalibrationRatio& observed, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw RangeError("alpha must lie in (0, 1]");
  }
  return (1.0 - alpha) * prev + alpha * observed.ratio;
}

AdaptiveRatio::AdaptiveRatio(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw RangeError("alpha must lie in (0, 1]");
  }
}

void AdaptiveRatio::observe(const CalibrationRatio& ratio) {
  if (!primed_) {
    value_ = ratio.ratio;
    primed_ = true;
  } else {
    value_ = update_adaptive_ratio(value_, ratio, alpha_);
  }
}

double AdaptiveRatio::value() const {
  if (!primed_) {
    throw NoRatioAvailableError("adaptive ratio has no observations yet");
  }
  return value_;
}

RatioProfile learn_profile(std::span<const CalibrationRatio> ratios,
                           const std::string& cluster_id) {
  RatioProfile profile;
  profile.cluster_id = cluster_id;
  std::array<std::vector<double>, 24> buckets;
  std::array<std::set<std::int64_t>, 24> days;
  for (const auto& r : ratios) {
    int h = hour_of_day(r.interval.start);
    buckets[h].push_back(r.ratio);
    days[h].insert(day_of(r.interval.start));
  }
  for (int h = 0; h < 24; ++h) {
    if (buckets[h].empty()) continue;  // unusable hour
    profile.profile_ratio[h] = median(buckets[h]);
    profile.support[h] = static_cast<int>(days[h].size());
  }
  return profile;
}

CrowdEstimate estimate_crowd(const IntervalCount& count, double ratio,
                             EstimateMethod method) {
  if (ratio < 0.0) {
    throw RangeError("ratio must be non-negative");
  }
  return CrowdEstimate{count.sensor_id, count.interval,
                       ratio * static_cast<double>(count.unique_devices), method};
}

std::vector<HourlyRatio> hourly_ratios(std::span<const CalibrationRatio> ratios) {
  std::map<std::pair<std::string, std::int64_t>, std::vector<double>> groups;
  for (const auto& r : ratios) {
    groups[{r.choke_point_id, hour_start(r.interval.start)}].push_back(r.ratio);
  }
  std::vector<HourlyRatio> out;
  out.reserve(groups.size());
  for (auto& [key, values] : groups) {
    HourlyRatio h;
    h.choke_point_id = key.first;
    h.hour_start = key.second;
    h.intervals_present = static_cast<int>(values.size());
    h.ratio = median(values);
    out.push_back(std::move(h));
  }
  return out;
}

ClusterCalibration calibrate_cluster(const Deployment& deployment,
                                     const std::string& cluster_id,
                                     std::span<const IntervalCount> counts,
                                     std::span<const CameraTick> ticks, double alpha) {
  ClusterCalibration out;
  auto chokes = deployment.choke_points(cluster_id);

  std::map<std::pair<std::string, std::int64_t>, const IntervalCount*> count_at;
  for (const auto& c : counts) count_at[{c.sensor_id, c.interval.start}] = &c;

  std::set<std::string> choke_sniffers;
  std::map<std::pair<std::string, std::int64_t>, const CameraTick*> tick_at;
  std::set<std::int64_t> camera_active;
  for (const auto* choke : chokes) choke_sniffers.insert(choke->sniffer_id);
  for (const auto& tick : ticks) {
    camera_active.insert(tick.interval.start);
    for (const auto* choke : chokes) {
      if (tick.camera_id != choke->camera_id && tick.camera_id != choke->id) continue;
      tick_at[{choke->sniffer_id, tick.interval.start}] = &tick;
      auto it = count_at.find({choke->sniffer_id, tick.interval.start});
      if (it == count_at.end() || it->second->unique_devices == 0) {
        continue;  // ratio undefined for the interval; skipped, never zeroed
      }
      out.ratios.push_back(compute_ratio(tick, *it->second, choke->id));
    }
  }
  std::sort(out.ratios.begin(), out.ratios.end(),
            [](const CalibrationRatio& a, const CalibrationRatio& b) {
              if (a.interval.start != b.interval.start) {
                return a.interval.start < b.interval.start;
              }
              return a.choke_point_id < b.choke_point_id;
            });

  out.profile = learn_profile(out.ratios, cluster_id);

  std::map<std::int64_t, std::vector<const CalibrationRatio*>> ratio_at;
  for (const auto& r : out.ratios) ratio_at[r.interval.start].push_back(&r);

  // Time-ordered pass keeps the adaptive ratio causal.
  std::vector<const IntervalCount*> by_time;
  by_time.reserve(counts.size());
  for (const auto& c : counts) by_time.push_back(&c);
  std::sort(by_time.begin(), by_time.end(),
            [](const IntervalCount* a, const IntervalCount* b) {
              if (a->interval.start != b->interval.start) {
                return a->interval.start < b->interval.start;
              }
              return a->sensor_id < b->sensor_id;
            });

  AdaptiveRatio adaptive(alpha);
  std::int64_t applied_until = std::numeric_limits<std::int64_t>::min();
  for (const IntervalCount* count : by_time) {
    std::int64_t start = count->interval.start;
    if (start > applied_until) {
      for (const auto* r : ratio_at[start]) adaptive.observe(*r);
      applied_until = start;
    }
    if (auto it = tick_at.find({count->sensor_id, start}); it != tick_at.end()) {
      out.estimates.push_back(CrowdEstimate{
          count->sensor_id, count->interval,
          static_cast<double>(it->second->count_in + it->second->count_out),
          EstimateMethod::ChokePointDirect});
      continue;
    }
    if (camera_active.contains(start) && adaptive.primed()) {
      out.estimates.push_back(
          estimate_crowd(*count, adaptive.value(), EstimateMethod::RatioExtrapolated));
      continue;
    }
    int hour = hour_of_day(start);
    if (out.profile.usable(hour)) {
      out.estimates.push_back(estimate_crowd(*count, out.profile.ratio_at(hour),
                                             EstimateMethod::ProfileExtrapolated));
    }
  }
  return out;
}

const char* to_string(EstimateMethod method) {
  switch (method) {
    case EstimateMethod::ChokePointDirect: return "choke_point_direct";
    case EstimateMethod::RatioExtrapolated: return "ratio_extrapolated";
    case EstimateMethod::ProfileExtrapolated: return "profile_extrapolated";
  }
  return "?";
}

EstimateMethod estimate_method_from(std::string_view name) {
  if (name == "choke_point_direct") return EstimateMethod::ChokePointDirect;
  if (name == "ratio_extrapolated") return EstimateMethod::RatioExtrapolated;
  if (name == "profile_extrapolated") return EstimateMethod::ProfileExtrapolated;
  throw ParseError("unknown estimate method '" + std::string(name) + "'");
}

std::string format_ratio(const CalibrationRatio& r) {
  detail::ordered_json j;
  j["choke"] = r.choke_point_id;
  j["start"] = r.interval.start;
  j["len"] = r.interval.length_s;
  j["ratio"] = r.ratio;
  return j.dump();
}

CalibrationRatio parse_ratio(std::string_view line) {
  auto j = detail::parse_json(std::string(line), "calibration ratio");
  CalibrationRatio r;
  r.choke_point_id = j.at("choke").get<std::string>();
  r.interval.start = j.at("start").get<std::int64_t>();
  r.interval.length_s = j.at("len").get<std::int64_t>();
  r.ratio = j.at("ratio").get<double>();
  if (r.ratio < 0.0) throw RangeError("ratio must be non-negative");
  return r;
}

std::string format_estimate(const CrowdEstimate& e) {
  detail::ordered_json j;
  j["area"] = e.area_id;
  j["start"] = e.interval.start;
  j["len"] = e.interval.length_s;
  j["people"] = e.people;
  j["method"] = to_string(e.method);
  return j.dump();
}

CrowdEstimate parse_estimate(std::string_view line) {
  auto j = detail::parse_json(std::string(line), "crowd estimate");
  CrowdEstimate e;
  e.area_id = j.at("area").get<std::string>();
  e.interval.start = j.at("start").get<std::int64_t>();
  e.interval.length_s = j.at("len").get<std::int64_t>();
  e.people = j.at("people").get<double>();
  e.method = estimate_method_from(j.at("method").get<std::string>());
  if (e.people < 0.0) throw RangeError("people must be non-negative");
  return e;
}

std::string format_profile(const RatioProfile& p) {
  detail::ordered_json j;
  j["cluster"] = p.cluster_id;
  auto hours = detail::ordered_json::array();
  for (int h = 0; h < 24; ++h) {
    if (!p.profile_ratio[h]) continue;
    detail::ordered_json hj;
    hj["h"] = h;
    hj["ratio"] = *p.profile_ratio[h];
    hj["support"] = p.support[h];
    hours.push_back(std::move(hj));
  }
  j["hours"] = std::move(hours);
  return j.dump();
}

RatioProfile parse_profile(std::string_view text) {
  auto j = detail::parse_json(std::string(text), "ratio profile");
  RatioProfile p;
  p.cluster_id = j.at("cluster").get<std::string>();
  for (const auto& hj : j.at("hours")) {
    int h = hj.at("h").get<int>();
    if (h < 0 || h > 23) throw RangeError("profile hour outside [0, 23]");
    p.profile_ratio[h] = hj.at("ratio").get<double>();
    p.support[h] = hj.at("support").get<int>();
  }
  return p;
}

}  // namespace crowdsense
