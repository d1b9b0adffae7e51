#pragma once

// Internal JSON helpers shared by the codecs. Not installed.

#include <nlohmann/json.hpp>

#include "crowdsense/errors.hpp"
#include "crowdsense/geometry.hpp"

namespace crowdsense::detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json point_to_json(const Point& p) {
  return ordered_json::array({p.x, p.y});
}

inline Point point_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(std::string(what) + ": expected [x, y]");
  }
  return Point{j[0].get<double>(), j[1].get<double>()};
}

inline ordered_json coverage_to_json(const Coverage& cov) {
  ordered_json j;
  std::visit(
      [&j](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Point>) {
          j["type"] = "point";
          j["pos"] = point_to_json(s);
        } else if constexpr (std::is_same_v<T, Circle>) {
          j["type"] = "circle";
          j["center"] = point_to_json(s.center);
          j["radius_m"] = s.radius_m;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          j["type"] = "rectangle";
          j["min"] = point_to_json(s.min);
          j["max"] = point_to_json(s.max);
        } else {
          j["type"] = "polygon";
          auto verts = ordered_json::array();
          for (const Point& v : s.vertices) verts.push_back(point_to_json(v));
          j["vertices"] = std::move(verts);
        }
      },
      cov.shape());
  return j;
}

inline Coverage coverage_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) {
    throw ParseError("coverage: expected object with 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "point") {
    return Coverage::point(point_from_json(j.at("pos"), "coverage.pos"));
  }
  if (type == "circle") {
    return Coverage::circle(point_from_json(j.at("center"), "coverage.center"),
                            j.at("radius_m").get<double>());
  }
  if (type == "rectangle") {
    return Coverage::rectangle(point_from_json(j.at("min"), "coverage.min"),
                               point_from_json(j.at("max"), "coverage.max"));
  }
  if (type == "polygon") {
    std::vector<Point> verts;
    for (const auto& v : j.at("vertices")) {
      verts.push_back(point_from_json(v, "coverage.vertices[]"));
    }
    return Coverage::polygon(std::move(verts));
  }
  throw ParseError("coverage: unknown type '" + type + "'");
}

/// Wraps nlohmann exceptions into ParseError with a uniform message.
inline nlohmann::json parse_json(const std::string& text, const char* what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ParseError(std::string(what) + ": malformed document");
  }
  return j;
}

}  // namespace crowdsense::detail
