#pragma once

#include <variant>
#include <vector>

namespace crowdsense {

/// Planar position in the deployment frame: meters, x = east, y = north.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
};

double distance(const Point& a, const Point& b);

/// Bearing from `from` to `to` in degrees, clockwise from north, in [0, 360).
/// Throws ZeroLengthVectorError when the points coincide.
double azimuth_deg(const Point& from, const Point& to);

/// Equirectangular projection of WGS84 coordinates around a declared origin.
/// Adequate for deployment areas a few kilometers across.
Point project_wgs84(double lat, double lon, double origin_lat, double origin_lon);

struct Circle {
  Point center;
  double radius_m = 0.0;
};

struct Rectangle {
  Point min;
  Point max;
};

struct Polygon {
  std::vector<Point> vertices;
};

/// Geographic extent of a sensor or observation.
class Coverage {
 public:
  using Shape = std::variant<Point, Circle, Rectangle, Polygon>;

  Coverage() : shape_(Point{}) {}
  explicit Coverage(Shape shape) : shape_(std::move(shape)) {}

  static Coverage point(Point p) { return Coverage(Shape{p}); }
  static Coverage circle(Point center, double radius_m);
  static Coverage rectangle(Point min, Point max);
  /// Polygon must be simple (non-self-intersecting) with >= 3 vertices.
  static Coverage polygon(std::vector<Point> vertices);

  const Shape& shape() const { return shape_; }

  /// Point containment; boundary points count as inside.
  bool contains(const Point& p) const;

  /// A representative interior point (center / centroid / the point itself).
  Point anchor() const;

 private:
  Shape shape_;
};

/// True when no two non-adjacent edges intersect.
bool is_simple_polygon(const std::vector<Point>& vertices);

/// Winding-number containment test used by Coverage::contains.
bool point_in_polygon(const Point& p, const std::vector<Point>& vertices);

/// Number of times the open segment (a, b) properly crosses the boundary of
/// `rect`, ignoring crossings that land on either endpoint. Used by the
/// simulator to attenuate radio paths through building walls.
int segment_rect_crossings(const Point& a, const Point& b, const Rectangle& rect);

/// Sub-ranges of [t0, t1] during which a point moving linearly from `a`
/// (at t0) to `b` (at t1) lies inside the circle. At most one range.
struct TimeRange {
  double begin = 0.0;
  double end = 0.0;
};
bool segment_circle_overlap(const Point& a, const Point& b, double t0, double t1,
                            const Circle& c, TimeRange& out);

}  // namespace crowdsense
