#include "bsp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "bsp/error.hpp"

namespace bsp {
namespace {

double signed_area(std::span<const Point2> v) {
  double twice = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    twice += cross(a, b);
  }
  return 0.5 * twice;
}

double extent(std::span<const Point2> v) {
  double e = 1.0;
  for (const Point2& p : v) e = std::max({e, std::abs(p.x), std::abs(p.y)});
  return e;
}

// Distance from b to the line through a and c.
double offset_from_chord(Point2 a, Point2 b, Point2 c) {
  const Point2 ac = c - a;
  const double len = norm(ac);
  if (len == 0.0) return norm(b - a);
  return std::abs(cross(ac, b - a)) / len;
}

// One pass of merging; returns true if anything was removed.
bool simplify_once(std::vector<Point2>& v, double dup_tol) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[(i + n - 1) % n];
    const Point2 b = v[i];
    const Point2 c = v[(i + 1) % n];
    const Point2 ab = b - a;
    const Point2 bc = c - b;
    const double lab = norm(ab);
    const double lbc = norm(bc);
    const bool duplicate = lab <= dup_tol;
    const bool flat = std::abs(cross(ab, bc)) <= kEpsGeom * lab * lbc ||
                      offset_from_chord(a, b, c) <= dup_tol;
    if (duplicate || flat) {
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
  }
  return false;
}

std::string describe(std::span<const Point2> v) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    os << (i ? ", " : "") << "(" << v[i].x << ", " << v[i].y << ")";
  }
  os << "]";
  return os.str();
}

struct ClipResult {
  std::vector<Point2> below;
  std::vector<Point2> above;
  std::vector<Point2> chord;
};

// Sutherland-Hodgman against a single line, producing both sides at once from
// the same signed distances so the shared chord is bitwise identical.
ClipResult clip(std::span<const Point2> v, Point2 normal, double offset) {
  ClipResult out;
  const std::size_t n = v.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = dot(v[i], normal) - offset;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (s[i] <= 0.0) out.below.push_back(v[i]);
    if (s[i] >= 0.0) out.above.push_back(v[i]);
    if (s[i] == 0.0) out.chord.push_back(v[i]);
    if ((s[i] < 0.0 && s[j] > 0.0) || (s[i] > 0.0 && s[j] < 0.0)) {
      const double t = s[i] / (s[i] - s[j]);
      const Point2 p = v[i] + t * (v[j] - v[i]);
      out.below.push_back(p);
      out.above.push_back(p);
      out.chord.push_back(p);
    }
  }
  return out;
}

}  // namespace

double reduce_angle(double theta) {
  double r = std::fmod(theta, M_PI);
  if (r <= 0.0) r += M_PI;
  return r;
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  for (const Point2& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      fail(ErrorKind::kInvalidPolygon, "non-finite vertex in " + describe(vertices_));
    }
  }
  if (signed_area(vertices_) < 0.0) std::reverse(vertices_.begin(), vertices_.end());
  const double dup_tol = 1e-12 * extent(vertices_);
  while (simplify_once(vertices_, dup_tol)) {
  }
  if (vertices_.size() < 3) {
    fail(ErrorKind::kInvalidPolygon, "fewer than 3 distinct vertices");
  }
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[(i + n - 1) % n];
    const Point2 b = vertices_[i];
    const Point2 c = vertices_[(i + 1) % n];
    if (cross(b - a, c - b) <= 0.0) {
      fail(ErrorKind::kInvalidPolygon, "not strictly convex: " + describe(vertices_));
    }
  }
  area_ = signed_area(vertices_);
  if (!(area_ > 0.0)) fail(ErrorKind::kInvalidPolygon, "zero area");
}

ConvexPolygon ConvexPolygon::unit_square() { return rectangle(0.0, 0.0, 1.0, 1.0); }

ConvexPolygon ConvexPolygon::rectangle(double x0, double y0, double x1, double y1) {
  return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

double perimeter(const ConvexPolygon& poly) {
  const auto v = poly.vertices();
  double total = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) total += norm(v[(i + 1) % n] - v[i]);
  return total;
}

ProjectionSegment project(const ConvexPolygon& poly, double theta) {
  const Point2 axis = direction(theta);
  ProjectionSegment seg{std::numeric_limits<double>::infinity(),
                        -std::numeric_limits<double>::infinity()};
  for (const Point2& p : poly.vertices()) {
    const double d = dot(p, axis);
    seg.lo = std::min(seg.lo, d);
    seg.hi = std::max(seg.hi, d);
  }
  return seg;
}

double diameter(const ConvexPolygon& poly) {
  // Rotating calipers over antipodal vertex pairs.
  const auto v = poly.vertices();
  const std::size_t n = v.size();
  auto twice_area = [&](std::size_t i, std::size_t j, std::size_t k) {
    return std::abs(cross(v[j % n] - v[i % n], v[k % n] - v[i % n]));
  };
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t i1 = (i + 1) % n;
    while (twice_area(i, i1, j + 1) > twice_area(i, i1, j)) ++j;
    best = std::max({best, norm(v[i] - v[j % n]), norm(v[i1] - v[j % n])});
  }
  return best;
}

bool contains(const ConvexPolygon& poly, Point2 p) {
  const auto v = poly.vertices();
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point2 a = v[i];
    const Point2 e = v[(i + 1) % n] - a;
    if (cross(e, p - a) < -kEpsGeom * norm(e)) return false;
  }
  return true;
}

Point2 centroid(const ConvexPolygon& poly) {
  const auto v = poly.vertices();
  double cx = 0.0, cy = 0.0, twice = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    const double w = cross(a, b);
    twice += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (3.0 * twice), cy / (3.0 * twice)};
}

bool crosses(const ConvexPolygon& poly, const CutLine& cut) {
  const ProjectionSegment seg = project(poly, cut.theta);
  return seg.lo < cut.offset && cut.offset < seg.hi;
}

std::pair<ConvexPolygon, ConvexPolygon> split(const ConvexPolygon& poly,
                                              const CutLine& cut) {
  if (!crosses(poly, cut)) {
    fail(ErrorKind::kCutMisses, "offset outside the open projection interval");
  }
  ClipResult parts = clip(poly.vertices(), cut.normal(), cut.offset);
  auto make = [](std::vector<Point2> v) {
    try {
      ConvexPolygon child(std::move(v));
      if (child.area() < kEpsArea) fail(ErrorKind::kDegenerateCut, "child area below tolerance");
      return child;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kDegenerateCut) throw;
      fail(ErrorKind::kDegenerateCut, e.what());
    }
  };
  ConvexPolygon below = make(std::move(parts.below));
  ConvexPolygon above = make(std::move(parts.above));
  return {std::move(below), std::move(above)};
}

double chord_length(const ConvexPolygon& poly, const CutLine& cut) {
  if (!crosses(poly, cut)) return 0.0;
  const ClipResult parts = clip(poly.vertices(), cut.normal(), cut.offset);
  double best = 0.0;
  for (std::size_t i = 0; i < parts.chord.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.chord.size(); ++j) {
      best = std::max(best, norm(parts.chord[i] - parts.chord[j]));
    }
  }
  return best;
}

std::optional<ConvexPolygon> intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::vector<Point2> current(a.vertices().begin(), a.vertices().end());
  const auto bv = b.vertices();
  for (std::size_t i = 0, n = bv.size(); i < n && !current.empty(); ++i) {
    const Point2 e = bv[(i + 1) % n] - bv[i];
    // Outward normal of a counter-clockwise edge.
    const Point2 outward{e.y, -e.x};
    current = clip(current, outward, dot(outward, bv[i])).below;
  }
  if (current.size() < 3) return std::nullopt;
  try {
    ConvexPolygon result(std::move(current));
    if (result.area() < kEpsArea) return std::nullopt;
    return result;
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool approx_equal(const ConvexPolygon& a, const ConvexPolygon& b, double tol) {
  auto one_way = [tol](std::span<const Point2> from, std::span<const Point2> to) {
    for (const Point2& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point2& q : to) best = std::min(best, norm(p - q));
      if (best > tol) return false;
    }
    return true;
  };
  return one_way(a.vertices(), b.vertices()) && one_way(b.vertices(), a.vertices());
}

ConvexPolygon translate(const ConvexPolygon& poly, Point2 v) {
  std::vector<Point2> out;
  out.reserve(poly.size());
  for (const Point2& p : poly.vertices()) out.push_back(p + v);
  return ConvexPolygon(std::move(out));
}

ConvexPolygon rotate(const ConvexPolygon& poly, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<Point2> out;
  out.reserve(poly.size());
  for (const Point2& p : poly.vertices()) out.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
  return ConvexPolygon(std::move(out));
}

}  // namespace bsp
