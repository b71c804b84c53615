#include <doctest.h>

#include <cmath>

#include "bsp/error.hpp"
#include "bsp/geometry.hpp"
#include "test_support.hpp"

using namespace bsp;
using bsp::testing::oracle_area;
using bsp::testing::oracle_perimeter;
using bsp::testing::random_convex_polygon;
using bsp::testing::vertices_of;

TEST_SUITE("geometry") {
  TEST_CASE("perimeter of simple shapes") {
    CHECK(perimeter(ConvexPolygon::unit_square()) == doctest::Approx(4.0));
    const ConvexPolygon tri({{0, 0}, {1, 0}, {0, 1}});
    CHECK(perimeter(tri) == doctest::Approx(2.0 + std::sqrt(2.0)));
  }

  TEST_CASE("perimeter and area agree with edge-sum and shoelace oracles") {
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
      const ConvexPolygon p = random_convex_polygon(rng, 8);
      const auto v = vertices_of(p);
      CHECK(std::abs(perimeter(p) - oracle_perimeter(v)) < 1e-12);
      CHECK(std::abs(p.area() - oracle_area(v)) < 1e-12);
    }
  }

  TEST_CASE("construction normalises orientation and drops redundant vertices") {
    const ConvexPolygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(cw.area() == doctest::Approx(1.0));
    CHECK(oracle_area(vertices_of(cw)) > 0.0);
    const ConvexPolygon extra({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {1, 1}, {0, 1}});
    CHECK(extra.size() == 4);
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), Error);
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), Error);
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.2}, {1, 1}}), Error);  // reflex
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {NAN, 1}}), Error);
  }

  TEST_CASE("projection lengths") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    CHECK(project(sq, M_PI / 2).length() == doctest::Approx(1.0));
    CHECK(project(sq, M_PI / 4).length() == doctest::Approx(std::sqrt(2.0)));
    Rng rng(3);
    for (int k = 0; k < 1000; ++k) {
      const double t = rng.uniform(0.0, M_PI);
      CHECK(std::abs(project(sq, t).length() - (std::abs(std::cos(t)) + std::abs(std::sin(t)))) <
            1e-12);
    }
    for (int k = 0; k < 200; ++k) {
      const ConvexPolygon p = random_convex_polygon(rng, 3 + k % 10);
      const double t = rng.uniform(0.0, M_PI);
      const auto [lo, hi] = bsp::testing::oracle_projection(vertices_of(p), t);
      const ProjectionSegment seg = project(p, t);
      CHECK(seg.lo == doctest::Approx(lo));
      CHECK(seg.hi == doctest::Approx(hi));
      CHECK(seg.length() > 0.0);
    }
  }

  TEST_CASE("split of the unit square") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    auto [left, right] = split(sq, {M_PI, -0.5});  // x = 0.5
    CHECK(perimeter(left) == doctest::Approx(3.0));
    CHECK(perimeter(right) == doctest::Approx(3.0));
    // The first child has projection below the offset: -x < -0.5, i.e. x > 0.5.
    CHECK(centroid(left).x == doctest::Approx(0.75));
    auto [low, high] = split(sq, {M_PI / 2, 0.25});
    CHECK(low.area() == doctest::Approx(0.25));
    CHECK(high.area() == doctest::Approx(0.75));
    CHECK_THROWS_AS(split(sq, {M_PI / 2, 1.0}), Error);
    CHECK_THROWS_AS(split(sq, {M_PI / 2, -0.1}), Error);
    try {
      split(sq, {M_PI / 2, 2.0});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kCutMisses);
    }
  }

  TEST_CASE("cut through a vertex") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    // The diagonal x + y = 1 passes through (1, 0) and (0, 1).
    auto [a, b] = split(sq, {M_PI / 4, std::sqrt(0.5)});
    CHECK(a.size() == 3);
    CHECK(b.size() == 3);
    CHECK(a.area() + b.area() == doctest::Approx(1.0));
  }

  TEST_CASE("random splits conserve area and perimeter") {
    Rng rng(5);
    for (int k = 0; k < 2000; ++k) {
      const ConvexPolygon p = random_convex_polygon(rng, 3 + k % 10);
      const double t = rng.uniform(1e-6, M_PI);
      const auto v = vertices_of(p);
      const auto [lo, hi] = bsp::testing::oracle_projection(v, t);
      const double off = rng.uniform(lo + 1e-6 * (hi - lo), hi - 1e-6 * (hi - lo));
      const CutLine cut{t, off};
      auto [a, b] = split(p, cut);
      const auto chord = bsp::testing::oracle_chord(v, cut.normal(), off);
      REQUIRE(chord.size() == 2);
      const double len = std::hypot(chord[0].x - chord[1].x, chord[0].y - chord[1].y);
      CHECK(std::abs(a.area() + b.area() - p.area()) < 1e-9);
      CHECK(std::abs(perimeter(a) + perimeter(b) - perimeter(p) - 2 * len) < 1e-9);
      CHECK(chord_length(p, cut) == doctest::Approx(len));
      CHECK(bsp::testing::oracle_strictly_convex(vertices_of(a)));
      CHECK(bsp::testing::oracle_strictly_convex(vertices_of(b)));
      for (const Point2& q : a.vertices()) CHECK(cut.side(q) <= 1e-9);
      for (const Point2& q : b.vertices()) CHECK(cut.side(q) >= -1e-9);
    }
  }

  TEST_CASE("diameter") {
    CHECK(diameter(ConvexPolygon::unit_square()) == doctest::Approx(std::sqrt(2.0)));
    CHECK(diameter(ConvexPolygon({{0, 0}, {1, 0}, {0.5, 1e-6}})) == doctest::Approx(1.0));
    Rng rng(9);
    for (int k = 0; k < 300; ++k) {
      const ConvexPolygon p = random_convex_polygon(rng, 3 + k % 12);
      double best = 0.0;
      for (const Point2& a : p.vertices()) {
        for (const Point2& b : p.vertices()) best = std::max(best, std::hypot(a.x - b.x, a.y - b.y));
      }
      CHECK(diameter(p) == doctest::Approx(best).epsilon(1e-12));
    }
  }

  TEST_CASE("contains uses the closed polygon") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    CHECK(contains(sq, {0.5, 0.5}));
    CHECK_FALSE(contains(sq, {1.5, 0.5}));
    CHECK(contains(sq, {1.0, 0.5}));
    CHECK(contains(sq, {0.0, 0.0}));
    CHECK_FALSE(contains(sq, {1.0 + 1e-6, 0.5}));
  }

  TEST_CASE("intersection") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    auto same = intersect(sq, sq);
    REQUIRE(same);
    CHECK(approx_equal(*same, sq));
    auto half = intersect(sq, ConvexPolygon::rectangle(0.5, 0, 1.5, 1));
    REQUIRE(half);
    CHECK(approx_equal(*half, ConvexPolygon::rectangle(0.5, 0, 1, 1)));
    CHECK_FALSE(intersect(sq, ConvexPolygon::rectangle(2, 2, 3, 3)));
    Rng rng(13);
    for (int k = 0; k < 100; ++k) {
      const ConvexPolygon a = random_convex_polygon(rng, 6);
      const ConvexPolygon b = random_convex_polygon(rng, 7);
      const auto ab = intersect(a, b);
      const auto ba = intersect(b, a);
      REQUIRE(ab.has_value() == ba.has_value());
      if (ab) CHECK(approx_equal(*ab, *ba, 1e-9));
      auto aa = intersect(a, a);
      REQUIRE(aa);
      CHECK(approx_equal(*aa, a));
    }
  }

  TEST_CASE("rigid motions preserve perimeter and area") {
    Rng rng(17);
    const ConvexPolygon p = random_convex_polygon(rng, 9);
    const ConvexPolygon q = rotate(translate(p, {0.3, -0.2}), 1.1);
    CHECK(perimeter(q) == doctest::Approx(perimeter(p)));
    CHECK(q.area() == doctest::Approx(p.area()));
  }

  TEST_CASE("axis directions are exact") {
    CHECK(direction(M_PI / 2).x == 0.0);
    CHECK(direction(M_PI).y == 0.0);
    CHECK(reduce_angle(0.0) == M_PI);
    CHECK(reduce_angle(M_PI + 0.25) == doctest::Approx(0.25));
    CHECK(reduce_angle(-0.25) == doctest::Approx(M_PI - 0.25));
  }
}
