#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsp/error.hpp"
#include "bsp/measure.hpp"
#include "bsp/stats.hpp"
#include "test_support.hpp"

using namespace bsp;
using bsp::testing::oracle_projection;
using bsp::testing::random_convex_polygon;
using bsp::testing::vertices_of;

namespace {

// Integral of f(t) * |l(t)| over [a, b], with |l| taken from the vertex list
// and the range cut at every kink of |l| (edge-normal directions).
template <typename F>
double oracle_weighted_length(const std::vector<Point2>& v, F f, double a, double b) {
  std::vector<double> knots{a, b};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 p = v[i];
    const Point2 q = v[(i + 1) % v.size()];
    double k = std::atan2(q.y - p.y, q.x - p.x) + M_PI / 2;  // edge normal
    k = std::fmod(k, M_PI);
    if (k < 0) k += M_PI;
    if (k > a && k < b) knots.push_back(k);
  }
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) {
          const auto [lo, hi] = oracle_projection(v, t);
          return f(t) * (hi - lo);
        },
        knots[i], knots[i + 1], 10, 1e-13);
  }
  return total;
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("closed-form block measures on the unit square") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    CHECK(block_measure(sq, DirectionWeight::uniform()) == 4.0);
    CHECK(block_measure(sq, DirectionWeight::axis_aligned()) == doctest::Approx(2.0));
    const auto flat = DirectionWeight::custom([](double) { return 1.0 / M_PI; }, 1.0 / M_PI);
    CHECK(block_measure(sq, flat) == doctest::Approx(4.0 / M_PI).epsilon(1e-9));
    const auto mix = DirectionWeight::mixed(
        {{DirectionWeight::axis_aligned(), 2.0}, {DirectionWeight::uniform(), 0.5}});
    CHECK(block_measure(sq, mix) == doctest::Approx(2.0 * 2.0 + 0.5 * 4.0));
    // One scaled component: omega = 1/pi without a custom function.
    const auto scaled = DirectionWeight::mixed({{DirectionWeight::uniform(), 1.0 / M_PI}});
    CHECK(block_measure(sq, scaled) == doctest::Approx(4.0 / M_PI).epsilon(1e-12));
    CHECK_THROWS_AS(DirectionWeight::mixed({}), Error);
  }

  TEST_CASE("uniform measure equals the perimeter and its quadrature") {
    Rng rng(21);
    for (int k = 0; k < 100; ++k) {
      const ConvexPolygon p = random_convex_polygon(rng, 3 + k % 10);
      CHECK(block_measure(p, DirectionWeight::uniform()) == perimeter(p));
      const double q = block_measure_by_quadrature(p, DirectionWeight::uniform());
      CHECK(std::abs(q - perimeter(p)) < 1e-6 * perimeter(p));
    }
  }

  TEST_CASE("custom measure agrees with an independent quadrature") {
    Rng rng(22);
    auto omega = [](double t) { return 1.0 + 0.5 * std::cos(2.0 * t) + 0.25 * std::sin(6.0 * t); };
    const auto w = DirectionWeight::custom(omega, 1.75);
    for (int k = 0; k < 30; ++k) {
      const ConvexPolygon p = random_convex_polygon(rng, 3 + k % 8);
      const double oracle = oracle_weighted_length(vertices_of(p), omega, 0.0, M_PI);
      CHECK(block_measure(p, w) == doctest::Approx(oracle).epsilon(1e-8));
    }
  }

  TEST_CASE("direction density values and normalisation") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    const auto u = DirectionWeight::uniform();
    CHECK(direction_density(sq, u, M_PI / 4) == doctest::Approx(std::sqrt(2.0) / 4));
    CHECK(direction_density(sq, u, M_PI) == doctest::Approx(0.25));
    Rng rng(23);
    for (int k = 0; k < 10; ++k) {
      const ConvexPolygon p = random_convex_polygon(rng, 5 + k);
      const double total = oracle_weighted_length(
          vertices_of(p), [](double) { return 1.0; }, 0.0, M_PI);
      CHECK(total / perimeter(p) == doctest::Approx(1.0).epsilon(1e-9));
      const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double t) { return direction_density(p, u, t); }, 0.0, M_PI, 15, 1e-12);
      CHECK(std::abs(integral - 1.0) < 1e-6);
    }
    const auto axis = DirectionWeight::axis_aligned();
    CHECK(direction_density(sq, axis, M_PI / 2) == doctest::Approx(0.5));
    CHECK(direction_density(sq, axis, M_PI) == doctest::Approx(0.5));
    CHECK(direction_density(sq, axis, 1.0) == 0.0);
    CHECK(atoms(axis).size() == 2);
    CHECK(atoms(u).empty());
  }

  TEST_CASE("axis-aligned cuts are exactly axis-parallel and balanced on the square") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    Rng rng(24);
    const int n = 1'000'000;
    int vertical = 0;
    for (int i = 0; i < n; ++i) {
      const CutSample s = sample_cut(sq, DirectionWeight::axis_aligned(), rng);
      const Point2 nrm = s.cut.normal();
      REQUIRE((nrm.x == 0.0 || nrm.y == 0.0));
      vertical += s.cut.theta == M_PI / 2;
    }
    CHECK(std::abs(static_cast<double>(vertical) / n - 0.5) < 0.002);
  }

  TEST_CASE("axis-aligned directions follow the side lengths on a rectangle") {
    const ConvexPolygon r = ConvexPolygon::rectangle(0, 0, 3, 1);
    Rng rng(25);
    int horizontal_normal = 0;  // theta = pi: normal along x, cut is vertical
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      horizontal_normal += sample_direction(r, DirectionWeight::axis_aligned(), rng).theta == M_PI;
    }
    CHECK(static_cast<double>(horizontal_normal) / n == doctest::Approx(0.75).epsilon(0.01));
  }

  TEST_CASE("mixture frequency of the axis branch") {
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    const double c1 = 1.0, c2 = 1.0;
    const auto mix = DirectionWeight::mixed(
        {{DirectionWeight::axis_aligned(), c1}, {DirectionWeight::uniform(), c2}});
    Rng rng(26);
    const int n = 1'000'000;
    int axis = 0;
    for (int i = 0; i < n; ++i) {
      const CutSample s = sample_cut(sq, mix, rng);
      REQUIRE(s.component.has_value());
      axis += *s.component == 0;
    }
    const double expected = c1 * 2 / (c1 * 2 + c2 * 4);
    CHECK(std::abs(static_cast<double>(axis) / n - expected) < 0.005);
  }

  TEST_CASE("a false supremum is reported") {
    const auto bad = DirectionWeight::custom([](double) { return 1.0; }, 0.1);
    Rng rng(27);
    bool thrown = false;
    try {
      for (int i = 0; i < 1000; ++i) sample_direction(ConvexPolygon::unit_square(), bad, rng);
    } catch (const Error& e) {
      thrown = e.kind() == ErrorKind::kEnvelopeViolation;
    }
    CHECK(thrown);
  }

  TEST_CASE("custom sampler follows omega * |l|") {
    auto omega = [](double t) { return std::abs(std::cos(4.0 * t)); };
    const auto w = DirectionWeight::custom(omega, 1.0);
    const ConvexPolygon sq = ConvexPolygon::unit_square();
    const auto v = vertices_of(sq);
    constexpr int kBins = 40;
    std::vector<double> probs(kBins), counts(kBins, 0.0);
    const double total = oracle_weighted_length(v, omega, 0.0, M_PI);
    for (int b = 0; b < kBins; ++b) {
      probs[b] = oracle_weighted_length(v, omega, M_PI * b / kBins, M_PI * (b + 1) / kBins) / total;
    }
    Rng rng(28);
    for (int i = 0; i < 200000; ++i) {
      const double t = sample_direction(sq, w, rng).theta;
      counts[std::min(kBins - 1, static_cast<int>(t / M_PI * kBins))] += 1;
    }
    CHECK(stats::chi_square_gof(counts, probs).p_value > 0.01);
  }

  TEST_CASE("cuts on a triangle always cross its interior") {
    const ConvexPolygon tri({{0, 0}, {1, 0}, {0, 1}});
    Rng rng(29);
    for (int i = 0; i < 10000; ++i) {
      const CutSample s = sample_cut(tri, DirectionWeight::uniform(), rng);
      const auto chord = bsp::testing::oracle_chord(vertices_of(tri), s.cut.normal(), s.cut.offset);
      REQUIRE(chord.size() == 2);
      CHECK(crosses(tri, s.cut));
    }
  }

  TEST_CASE("uniform direction law is invariant under rigid motions") {
    Rng rng(30);
    const ConvexPolygon p = random_convex_polygon(rng, 7);
    const double phi = 0.7;
    const ConvexPolygon q = translate(rotate(p, phi), {0.4, -0.3});
    std::vector<double> a, b;
    for (int i = 0; i < 100000; ++i) {
      a.push_back(sample_direction(p, DirectionWeight::uniform(), rng).theta);
      double t = sample_direction(q, DirectionWeight::uniform(), rng).theta - phi;
      if (t <= 0) t += M_PI;
      b.push_back(t);
    }
    CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
  }
}
