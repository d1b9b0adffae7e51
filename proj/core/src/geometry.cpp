#include "crowdsense/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "crowdsense/errors.hpp"

namespace crowdsense {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEarthRadiusM = 6371000.0;

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point& p, const Point& a, const Point& b) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12 &&
         std::abs(cross(a, b, p)) < 1e-9;
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  double d1 = cross(c, d, a);
  double d2 = cross(c, d, b);
  double d3 = cross(a, b, c);
  double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

}  // namespace

double distance(const Point& a, const Point& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

double azimuth_deg(const Point& from, const Point& to) {
  double dx = to.x - from.x;
  double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0) {
    throw ZeroLengthVectorError("azimuth undefined for coincident points");
  }
  // atan2(east, north) gives the clockwise-from-north convention.
  double deg = std::atan2(dx, dy) * 180.0 / kPi;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

Point project_wgs84(double lat, double lon, double origin_lat, double origin_lon) {
  double lat0 = origin_lat * kPi / 180.0;
  double x = kEarthRadiusM * std::cos(lat0) * (lon - origin_lon) * kPi / 180.0;
  double y = kEarthRadiusM * (lat - origin_lat) * kPi / 180.0;
  return {x, y};
}

Coverage Coverage::circle(Point center, double radius_m) {
  if (!(radius_m > 0.0)) {
    throw ConfigError("coverage circle radius must be positive");
  }
  return Coverage(Shape{Circle{center, radius_m}});
}

Coverage Coverage::rectangle(Point min, Point max) {
  if (!(min.x < max.x && min.y < max.y)) {
    throw ConfigError("coverage rectangle must have min < max on both axes");
  }
  return Coverage(Shape{Rectangle{min, max}});
}

Coverage Coverage::polygon(std::vector<Point> vertices) {
  if (vertices.size() < 3) {
    throw ConfigError("coverage polygon needs at least 3 vertices");
  }
  if (!is_simple_polygon(vertices)) {
    throw ConfigError("coverage polygon must be simple");
  }
  return Coverage(Shape{Polygon{std::move(vertices)}});
}

bool Coverage::contains(const Point& p) const {
  return std::visit(
      [&p](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Point>) {
          return s == p;
        } else if constexpr (std::is_same_v<T, Circle>) {
          return distance(s.center, p) <= s.radius_m;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return p.x >= s.min.x && p.x <= s.max.x && p.y >= s.min.y && p.y <= s.max.y;
        } else {
          return point_in_polygon(p, s.vertices);
        }
      },
      shape_);
}

Point Coverage::anchor() const {
  return std::visit(
      [](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Point>) {
          return s;
        } else if constexpr (std::is_same_v<T, Circle>) {
          return s.center;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return {(s.min.x + s.max.x) / 2.0, (s.min.y + s.max.y) / 2.0};
        } else {
          Point c{0.0, 0.0};
          for (const Point& v : s.vertices) {
            c.x += v.x;
            c.y += v.y;
          }
          c.x /= static_cast<double>(s.vertices.size());
          c.y /= static_cast<double>(s.vertices.size());
          return c;
        }
      },
      shape_);
}

bool is_simple_polygon(const std::vector<Point>& vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    if (a == b) return false;  // degenerate edge
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip the edge itself and the two adjacent edges.
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Point& c = vertices[j];
      const Point& d = vertices[(j + 1) % n];
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

bool point_in_polygon(const Point& p, const std::vector<Point>& vertices) {
  const std::size_t n = vertices.size();
  // Boundary counts as inside.
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, vertices[i], vertices[(i + 1) % n])) return true;
  }
  // Winding number.
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(a, b, p) > 0) ++winding;
    } else {
      if (b.y <= p.y && cross(a, b, p) < 0) --winding;
    }
  }
  return winding != 0;
}

int segment_rect_crossings(const Point& a, const Point& b, const Rectangle& rect) {
  const Point corners[4] = {
      rect.min, {rect.max.x, rect.min.y}, rect.max, {rect.min.x, rect.max.y}};
  int crossings = 0;
  for (int i = 0; i < 4; ++i) {
    const Point& c = corners[i];
    const Point& d = corners[(i + 1) % 4];
    if (!segments_intersect(a, b, c, d)) continue;
    // Find the intersection parameter along (a, b) and drop endpoint hits:
    // a node mounted on a wall does not attenuate its own wall.
    double rx = b.x - a.x, ry = b.y - a.y;
    double sx = d.x - c.x, sy = d.y - c.y;
    double denom = rx * sy - ry * sx;
    if (std::abs(denom) < 1e-12) continue;  // collinear graze
    double t = ((c.x - a.x) * sy - (c.y - a.y) * sx) / denom;
    if (t > 1e-9 && t < 1.0 - 1e-9) ++crossings;
  }
  return crossings;
}

bool segment_circle_overlap(const Point& a, const Point& b, double t0, double t1,
                            const Circle& c, TimeRange& out) {
  // Solve |a + s(b-a) - center|^2 = r^2 for s in [0,1].
  double dx = b.x - a.x, dy = b.y - a.y;
  double fx = a.x - c.center.x, fy = a.y - c.center.y;
  double A = dx * dx + dy * dy;
  double B = 2.0 * (fx * dx + fy * dy);
  double C = fx * fx + fy * fy - c.radius_m * c.radius_m;
  double s_lo, s_hi;
  if (A < 1e-12) {
    // Stationary point.
    if (C > 0.0) return false;
    s_lo = 0.0;
    s_hi = 1.0;
  } else {
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return false;
    double root = std::sqrt(disc);
    s_lo = std::max(0.0, (-B - root) / (2.0 * A));
    s_hi = std::min(1.0, (-B + root) / (2.0 * A));
    if (s_lo >= s_hi) return false;
  }
  out.begin = t0 + s_lo * (t1 - t0);
  out.end = t0 + s_hi * (t1 - t0);
  return true;
}

}  // namespace crowdsense
