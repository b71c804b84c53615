#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace bsp {

// Predicate tolerance at unit scale.
inline constexpr double kEpsGeom = 1e-9;
// Children smaller than this are rejected as degenerate.
inline constexpr double kEpsArea = 1e-12;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

// Unit vector (cos theta, sin theta); the projection axis of a cut direction.
// Exact at the axis directions so that Mondrian-style cuts stay axis-parallel.
inline Point2 direction(double theta) {
  if (theta == M_PI / 2.0) return {0.0, 1.0};
  if (theta == M_PI) return {-1.0, 0.0};
  return {std::cos(theta), std::sin(theta)};
}

// Maps any angle onto (0, pi], identifying l(0) with l(pi).
double reduce_angle(double theta);

// A directed straight cut. The line is {x : x . (cos theta, sin theta) = offset},
// i.e. it is orthogonal to the projection axis l(theta) and crosses it at the
// signed position `offset`. Using the unit normal instead of (1, tan theta)
// keeps theta = pi/2 regular.
struct CutLine {
  double theta = M_PI;
  double offset = 0.0;

  Point2 normal() const { return direction(theta); }
  // Signed distance of p from the line; negative on the "below" side.
  double side(Point2 p) const { return dot(p, normal()) - offset; }

  friend bool operator==(const CutLine&, const CutLine&) = default;
};

struct ProjectionSegment {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

// Immutable, strictly convex polygon with counter-clockwise vertices.
class ConvexPolygon {
 public:
  // Accepts either orientation. Duplicate and collinear vertices are merged;
  // throws Error(kInvalidPolygon) if what remains is not a strictly convex
  // polygon with positive area.
  explicit ConvexPolygon(std::vector<Point2> vertices);

  static ConvexPolygon unit_square();
  static ConvexPolygon rectangle(double x0, double y0, double x1, double y1);

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double area() const { return area_; }

  friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

 private:
  std::vector<Point2> vertices_;
  double area_ = 0.0;
};

double perimeter(const ConvexPolygon& poly);
ProjectionSegment project(const ConvexPolygon& poly, double theta);
double diameter(const ConvexPolygon& poly);
bool contains(const ConvexPolygon& poly, Point2 p);
Point2 centroid(const ConvexPolygon& poly);

// Splits along the cut. `first` lies on the side with projection below the
// offset. Throws kCutMisses when the offset is not strictly inside the
// projection interval and kDegenerateCut when a child has area < kEpsArea.
std::pair<ConvexPolygon, ConvexPolygon> split(const ConvexPolygon& poly,
                                              const CutLine& cut);

// Length of the chord the cut leaves inside the polygon (0 if it misses).
double chord_length(const ConvexPolygon& poly, const CutLine& cut);

// Whether the cut line passes through the interior.
bool crosses(const ConvexPolygon& poly, const CutLine& cut);

std::optional<ConvexPolygon> intersect(const ConvexPolygon& a, const ConvexPolygon& b);

// True if the two polygons describe the same point set up to `tol` (Hausdorff
// distance between vertex sets after both are put in canonical form).
bool approx_equal(const ConvexPolygon& a, const ConvexPolygon& b, double tol = kEpsGeom);

ConvexPolygon translate(const ConvexPolygon& poly, Point2 v);
ConvexPolygon rotate(const ConvexPolygon& poly, double angle);

}  // namespace bsp
