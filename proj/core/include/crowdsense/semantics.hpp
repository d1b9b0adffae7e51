#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crowdsense/analytics.hpp"
#include "crowdsense/calibrate.hpp"
#include "crowdsense/deployment.hpp"
#include "crowdsense/geometry.hpp"

namespace crowdsense {

enum class SensorClass {
  PeopleCountSensor,
  PeopleFlowCountSensor,
  StayingPeopleCountSensor,
  PeopleStayDurationSensor,
};

enum class QuantityKind {
  CountPeople,
  CountPeopleMoving,
  CountPeopleStaying,
  PeopleStayDurationAverage,
};

enum class Unit { Item, SecondTime };

/// Geodetic azimuth in degrees, or a free-text heading label.
struct DirectionAzimuth {
  double degrees = 0.0;
  friend bool operator==(const DirectionAzimuth&, const DirectionAzimuth&) = default;
};
struct DirectionHeading {
  std::string label;
  friend bool operator==(const DirectionHeading&, const DirectionHeading&) = default;
};
using Direction = std::variant<DirectionAzimuth, DirectionHeading>;

/// One ontology-conformant analytics result. Construction goes through
/// make(), which enforces the class/kind/unit compatibility matrix:
///
///   PeopleCountSensor        -> CountPeople               / Item
///   PeopleFlowCountSensor    -> CountPeopleMoving         / Item  + direction
///   StayingPeopleCountSensor -> CountPeopleStaying        / Item
///   PeopleStayDurationSensor -> PeopleStayDurationAverage / SecondTime
///
/// Direction is mandatory for flow observations and rejected elsewhere, so
/// no object violating the matrix can exist.
class SemanticObservation {
 public:
  static SemanticObservation make(std::string device_id, SensorClass sensor_class,
                                  QuantityKind quantity_kind, Unit unit, double value,
                                  std::int64_t instant, Coverage coverage,
                                  Point platform_location,
                                  std::optional<Direction> direction = std::nullopt);

  const std::string& device_id() const { return device_id_; }
  SensorClass sensor_class() const { return sensor_class_; }
  QuantityKind quantity_kind() const { return quantity_kind_; }
  Unit unit() const { return unit_; }
  double value() const { return value_; }
  std::int64_t instant() const { return instant_; }
  const Coverage& coverage() const { return coverage_; }
  const Point& platform_location() const { return platform_location_; }
  const std::optional<Direction>& direction() const { return direction_; }

  bool operator==(const SemanticObservation& other) const;

 private:
  SemanticObservation() = default;

  std::string device_id_;
  SensorClass sensor_class_ = SensorClass::PeopleCountSensor;
  QuantityKind quantity_kind_ = QuantityKind::CountPeople;
  Unit unit_ = Unit::Item;
  double value_ = 0.0;
  std::int64_t instant_ = 0;
  Coverage coverage_;
  Point platform_location_;
  std::optional<Direction> direction_;
};

/// Crowd estimate -> PeopleCountSensor / CountPeople / Item.
/// Throws UnknownAreaError when the estimate's area cannot be resolved.
SemanticObservation annotate_estimate(const CrowdEstimate& estimate,
                                      const Deployment& deployment);

/// Flow -> PeopleFlowCountSensor / CountPeopleMoving / Item with a mandatory
/// DirectionAzimuth; the platform location is the from-sensor position.
SemanticObservation annotate_flow(const FlowRecord& flow, const Deployment& deployment);

/// Stay stats -> two observations: mean dwell as PeopleStayDurationSensor /
/// PeopleStayDurationAverage / SecondTime, and the waiting-device count as
/// StayingPeopleCountSensor / CountPeopleStaying / Item.
std::vector<SemanticObservation> annotate_stay(const StayStats& stay,
                                               const Deployment& deployment);

/// Canonical single-line document with m3-lite-prefixed ontology names and
/// fixed field order, so equal observations encode to equal bytes.
std::string encode(const SemanticObservation& observation);

/// Inverse of encode. Throws SchemaError naming the failing field.
SemanticObservation decode(std::string_view document);

const char* to_string(SensorClass c);
const char* to_string(QuantityKind k);
const char* to_string(Unit u);

}  // namespace crowdsense
