#include "crowdsense/semantics.hpp"

#include "crowdsense/errors.hpp"
#include "crowdsense/interval.hpp"
#include "json_util.hpp"

namespace crowdsense {

namespace {

constexpr const char* kPrefix = "m3-lite:";

struct MatrixRow {
  SensorClass sensor_class;
  QuantityKind quantity_kind;
  Unit unit;
  bool direction_required;
};

constexpr MatrixRow kMatrix[] = {
    {SensorClass::PeopleCountSensor, QuantityKind::CountPeople, Unit::Item, false},
    {SensorClass::PeopleFlowCountSensor, QuantityKind::CountPeopleMoving, Unit::Item,
     true},
    {SensorClass::StayingPeopleCountSensor, QuantityKind::CountPeopleStaying, Unit::Item,
     false},
    {SensorClass::PeopleStayDurationSensor, QuantityKind::PeopleStayDurationAverage,
     Unit::SecondTime, false},
};

const MatrixRow& row_for(SensorClass c) {
  for (const auto& row : kMatrix) {
    if (row.sensor_class == c) return row;
  }
  throw SchemaError("class", "unknown sensor class");
}

std::string prefixed(const char* name) { return std::string(kPrefix) + name; }

std::string strip_prefix(const std::string& value, const char* path) {
  if (!value.starts_with(kPrefix)) {
    throw SchemaError(path, "missing '" + std::string(kPrefix) + "' prefix");
  }
  return value.substr(std::string_view(kPrefix).size());
}

}  // namespace

const char* to_string(SensorClass c) {
  switch (c) {
    case SensorClass::PeopleCountSensor: return "PeopleCountSensor";
    case SensorClass::PeopleFlowCountSensor: return "PeopleFlowCountSensor";
    case SensorClass::StayingPeopleCountSensor: return "StayingPeopleCountSensor";
    case SensorClass::PeopleStayDurationSensor: return "PeopleStayDurationSensor";
  }
  return "?";
}

const char* to_string(QuantityKind k) {
  switch (k) {
    case QuantityKind::CountPeople: return "CountPeople";
    case QuantityKind::CountPeopleMoving: return "CountPeopleMoving";
    case QuantityKind::CountPeopleStaying: return "CountPeopleStaying";
    case QuantityKind::PeopleStayDurationAverage: return "PeopleStayDurationAverage";
  }
  return "?";
}

const char* to_string(Unit u) {
  return u == Unit::Item ? "Item" : "SecondTime";
}

SemanticObservation SemanticObservation::make(
    std::string device_id, SensorClass sensor_class, QuantityKind quantity_kind,
    Unit unit, double value, std::int64_t instant, Coverage coverage,
    Point platform_location, std::optional<Direction> direction) {
  const MatrixRow& row = row_for(sensor_class);
  if (quantity_kind != row.quantity_kind) {
    throw SchemaError("quantityKind",
                      std::string(to_string(quantity_kind)) + " incompatible with " +
                          to_string(sensor_class));
  }
  if (unit != row.unit) {
    throw SchemaError("unit", std::string(to_string(unit)) + " incompatible with " +
                                  to_string(quantity_kind));
  }
  if (row.direction_required && !direction) {
    throw SchemaError("direction",
                      std::string(to_string(sensor_class)) + " requires a direction");
  }
  if (!row.direction_required && direction) {
    throw SchemaError("direction", std::string(to_string(sensor_class)) +
                                       " does not carry a direction");
  }
  if (value < 0.0) {
    throw SchemaError("value", "must be non-negative");
  }
  if (direction) {
    if (const auto* az = std::get_if<DirectionAzimuth>(&*direction)) {
      if (az->degrees < 0.0 || az->degrees >= 360.0) {
        throw SchemaError("direction.azimuth", "must lie in [0, 360)");
      }
    }
  }
  if (device_id.empty()) {
    throw SchemaError("device", "must not be empty");
  }
  SemanticObservation o;
  o.device_id_ = std::move(device_id);
  o.sensor_class_ = sensor_class;
  o.quantity_kind_ = quantity_kind;
  o.unit_ = unit;
  o.value_ = value;
  o.instant_ = instant;
  o.coverage_ = std::move(coverage);
  o.platform_location_ = platform_location;
  o.direction_ = std::move(direction);
  return o;
}

bool SemanticObservation::operator==(const SemanticObservation& other) const {
  // Coverage has no operator==; canonical encoding stands in for it.
  return encode(*this) == encode(other);
}

SemanticObservation annotate_estimate(const CrowdEstimate& estimate,
                                      const Deployment& deployment) {
  Deployment::AreaRef area = deployment.area(estimate.area_id);
  return SemanticObservation::make(estimate.area_id, SensorClass::PeopleCountSensor,
                                   QuantityKind::CountPeople, Unit::Item, estimate.people,
                                   estimate.interval.start, area.coverage, area.position);
}

SemanticObservation annotate_flow(const FlowRecord& flow, const Deployment& deployment) {
  const SensorNode* from = deployment.find_node(flow.from_sensor);
  const SensorNode* to = deployment.find_node(flow.to_sensor);
  if (!from || !to) {
    throw UnknownAreaError("flow endpoints must be deployed sensors");
  }
  return SemanticObservation::make(
      flow.from_sensor + "--" + flow.to_sensor, SensorClass::PeopleFlowCountSensor,
      QuantityKind::CountPeopleMoving, Unit::Item, static_cast<double>(flow.devices),
      flow.interval.start, from->coverage, from->position,
      Direction{DirectionAzimuth{flow.direction_azimuth}});
}

std::vector<SemanticObservation> annotate_stay(const StayStats& stay,
                                               const Deployment& deployment) {
  Deployment::AreaRef area = deployment.area(stay.area_id);
  std::vector<SemanticObservation> out;
  out.push_back(SemanticObservation::make(
      stay.area_id, SensorClass::PeopleStayDurationSensor,
      QuantityKind::PeopleStayDurationAverage, Unit::SecondTime, stay.mean_dwell_s,
      stay.interval.start, area.coverage, area.position));
  out.push_back(SemanticObservation::make(
      stay.area_id, SensorClass::StayingPeopleCountSensor,
      QuantityKind::CountPeopleStaying, Unit::Item,
      static_cast<double>(stay.waiting_devices), stay.interval.start, area.coverage,
      area.position));
  return out;
}

std::string encode(const SemanticObservation& o) {
  detail::ordered_json j;
  j["device"] = o.device_id();
  j["class"] = prefixed(to_string(o.sensor_class()));
  j["quantityKind"] = prefixed(to_string(o.quantity_kind()));
  j["unit"] = prefixed(to_string(o.unit()));
  j["value"] = o.value();
  j["instant"] = format_utc(o.instant()).text;
  j["coverage"] = detail::coverage_to_json(o.coverage());
  j["location"] = detail::point_to_json(o.platform_location());
  if (o.direction()) {
    detail::ordered_json dj;
    if (const auto* az = std::get_if<DirectionAzimuth>(&*o.direction())) {
      dj["azimuth"] = az->degrees;
    } else {
      dj["heading"] = std::get<DirectionHeading>(*o.direction()).label;
    }
    j["direction"] = std::move(dj);
  }
  return j.dump();
}

namespace {

template <typename T>
T name_to_enum(const std::string& name, const char* path, std::span<const T> values) {
  for (T v : values) {
    if (name == to_string(v)) return v;
  }
  throw SchemaError(path, "unknown name '" + name + "'");
}

}  // namespace

SemanticObservation decode(std::string_view document) {
  nlohmann::json j = nlohmann::json::parse(document, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw SchemaError("", "malformed observation document");
  }
  for (const char* key : {"device", "class", "quantityKind", "unit", "value", "instant",
                          "coverage", "location"}) {
    if (!j.contains(key)) throw SchemaError(key, "missing field");
  }

  static constexpr SensorClass kClasses[] = {
      SensorClass::PeopleCountSensor, SensorClass::PeopleFlowCountSensor,
      SensorClass::StayingPeopleCountSensor, SensorClass::PeopleStayDurationSensor};
  static constexpr QuantityKind kKinds[] = {
      QuantityKind::CountPeople, QuantityKind::CountPeopleMoving,
      QuantityKind::CountPeopleStaying, QuantityKind::PeopleStayDurationAverage};
  static constexpr Unit kUnits[] = {Unit::Item, Unit::SecondTime};

  SensorClass cls = name_to_enum<SensorClass>(
      strip_prefix(j.at("class").get<std::string>(), "class"), "class", kClasses);
  QuantityKind kind = name_to_enum<QuantityKind>(
      strip_prefix(j.at("quantityKind").get<std::string>(), "quantityKind"),
      "quantityKind", kKinds);
  Unit unit = name_to_enum<Unit>(strip_prefix(j.at("unit").get<std::string>(), "unit"),
                                 "unit", kUnits);
  if (!j.at("value").is_number()) throw SchemaError("value", "must be a number");

  std::optional<Direction> direction;
  if (j.contains("direction")) {
    const auto& dj = j.at("direction");
    bool has_az = dj.contains("azimuth");
    bool has_heading = dj.contains("heading");
    if (has_az == has_heading) {
      throw SchemaError("direction", "exactly one of azimuth/heading required");
    }
    if (has_az) {
      direction = DirectionAzimuth{dj.at("azimuth").get<double>()};
    } else {
      direction = DirectionHeading{dj.at("heading").get<std::string>()};
    }
  }

  Coverage coverage;
  try {
    coverage = detail::coverage_from_json(j.at("coverage"));
  } catch (const Error& e) {
    throw SchemaError("coverage", e.what());
  }
  std::int64_t instant;
  try {
    instant = parse_utc(j.at("instant").get<std::string>().c_str());
  } catch (const Error& e) {
    throw SchemaError("instant", e.what());
  }
  Point location;
  try {
    location = detail::point_from_json(j.at("location"), "location");
  } catch (const Error& e) {
    throw SchemaError("location", e.what());
  }

  return SemanticObservation::make(j.at("device").get<std::string>(), cls, kind, unit,
                                   j.at("value").get<double>(), instant,
                                   std::move(coverage), location, std::move(direction));
}

}  // namespace crowdsense
