#include <doctest.h>

#include <cmath>

#include "bsp/error.hpp"
#include "bsp/process.hpp"
#include "bsp/stats.hpp"
#include "test_support.hpp"

using namespace bsp;
using bsp::testing::oracle_inside;
using bsp::testing::vertices_of;

namespace {

const ConvexPolygon kTriangle({{0.1, 0.1}, {0.6, 0.1}, {0.1, 0.6}});

double leaf_area_sum(const BspTree& t) {
  double a = 0.0;
  for (BlockId id : t.leaf_ids()) a += t.polygon(id).area();
  return a;
}

}  // namespace

TEST_SUITE("process") {
  TEST_CASE("sampling is reproducible and respects the budget") {
    Rng a(5), b(5);
    const BspTree t1 = sample_bsp(ConvexPolygon::unit_square(), 3.0, DirectionWeight::uniform(), a);
    const BspTree t2 = sample_bsp(ConvexPolygon::unit_square(), 3.0, DirectionWeight::uniform(), b);
    CHECK(t1 == t2);
    double prev = 0.0;
    for (const CutEvent& e : t1.events()) {
      CHECK(e.time > prev);
      CHECK(e.time < 3.0);
      prev = e.time;
    }
    CHECK(t1.num_nodes() == 2 * t1.num_cuts() + 1);
    CHECK(t1.num_leaves() == t1.num_cuts() + 1);
  }

  TEST_CASE("leaves tile the domain") {
    Rng rng(6);
    const ConvexPolygon p = bsp::testing::random_convex_polygon(rng, 9);
    for (int k = 0; k < 20; ++k) {
      const BspTree t = sample_bsp(p, 6.0, DirectionWeight::uniform(), rng);
      CHECK(std::abs(leaf_area_sum(t) - p.area()) < 1e-6);
    }
    // Long runs: well over a thousand cuts.
    const BspTree big = sample_bsp(ConvexPolygon::unit_square(), 25.0, DirectionWeight::uniform(), rng);
    CHECK(big.num_cuts() > 1000);
    CHECK(std::abs(leaf_area_sum(big) - 1.0) < 1e-6);
  }

  TEST_CASE("children are exactly the split of their parent") {
    Rng rng(7);
    const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 3.0, DirectionWeight::uniform(), rng);
    for (std::size_t k = 0; k < t.num_cuts(); ++k) {
      const CutEvent& e = t.events()[k];
      auto [below, above] = split(t.polygon(e.block_id), e.cut);
      CHECK(below == t.polygon(BspTree::below_child_id(k)));
      CHECK(above == t.polygon(BspTree::above_child_id(k)));
      CHECK(t.parent(BspTree::below_child_id(k)) == e.block_id);
      CHECK(t.cut_of(e.block_id) == k);
    }
  }

  TEST_CASE("probability of no cut under a tiny budget") {
    Rng rng(8);
    const int n = 1'000'000;
    int empty = 0;
    for (int i = 0; i < n; ++i) {
      empty += sample_bsp(ConvexPolygon::unit_square(), 0.01, DirectionWeight::uniform(), rng)
                   .num_cuts() == 0;
    }
    CHECK(std::abs(static_cast<double>(empty) / n - std::exp(-0.04)) < 0.001);
  }

  TEST_CASE("axis-aligned trees only contain axis cuts") {
    Rng rng(9);
    const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 10.0, DirectionWeight::axis_aligned(), rng);
    CHECK(t.num_cuts() > 10);
    for (const CutEvent& e : t.events()) CHECK((e.cut.theta == M_PI / 2 || e.cut.theta == M_PI));
  }

  TEST_CASE("perimeter sum obeys the diameter bound") {
    Rng rng(10);
    for (int i = 0; i < 2000; ++i) {
      const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 3.0, DirectionWeight::uniform(), rng);
      const double bound = 4.0 + 2.0 * static_cast<double>(t.num_cuts()) * std::sqrt(2.0);
      CHECK(total_perimeter(t) <= bound * (1.0 + 1e-12));
    }
  }

  TEST_CASE("runaway guard never fires up to budget 20") {
    Rng rng(11);
    for (int i = 0; i < 3; ++i) {
      CHECK_NOTHROW(sample_bsp(ConvexPolygon::unit_square(), 20.0, DirectionWeight::uniform(), rng));
    }
  }

  TEST_CASE("global clock: block frequencies and waiting times") {
    Rng rng(12);
    const std::vector<double> m{3.0, 1.0};
    const int n = 1'000'000;
    int first = 0;
    for (int i = 0; i < n; ++i) first += global_clock(m, rng).first == 0;
    CHECK(std::abs(static_cast<double>(first) / n - 0.75) < 0.003);

    const PartitionSnapshot single(0.0, {Block{0, ConvexPolygon::unit_square()}});
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += equivalent_global_clock(single, DirectionWeight::uniform(), rng).waiting_time;
    }
    CHECK(std::abs(total / n - 0.25) < 0.002);
  }

  TEST_CASE("global clock matches per-block exponential racing") {
    Rng rng(13);
    const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 1.0, DirectionWeight::uniform(), rng);
    const PartitionSnapshot snap = final_partition(t);
    REQUIRE(snap.size() >= 2);
    const int n = 200000;
    std::vector<double> clock_times, race_times;
    std::vector<double> clock_hits(snap.size(), 0.0), race_hits(snap.size(), 0.0);
    for (int i = 0; i < n; ++i) {
      const ClockDraw d = equivalent_global_clock(snap, DirectionWeight::uniform(), rng);
      clock_times.push_back(d.waiting_time);
      for (std::size_t k = 0; k < snap.size(); ++k) {
        if (snap.blocks()[k].id == d.block_id) clock_hits[k] += 1;
      }
      double best = INFINITY;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < snap.size(); ++k) {
        const double e = rng.exponential(perimeter(snap.blocks()[k].polygon));
        if (e < best) {
          best = e;
          arg = k;
        }
      }
      race_times.push_back(best);
      race_hits[arg] += 1;
    }
    CHECK(stats::ks_two_sample(clock_times, race_times).p_value > 0.01);
    CHECK(stats::chi_square_two_sample(clock_hits, race_hits).p_value > 0.01);
  }

  TEST_CASE("snapshots are right-continuous") {
    Rng rng(14);
    BspTree t = sample_bsp(ConvexPolygon::unit_square(), 2.0, DirectionWeight::uniform(), rng);
    REQUIRE(t.num_cuts() >= 3);
    CHECK(snapshot(t, 0.0).size() == 1);
    CHECK(snapshot(t, 2.0).size() == t.num_leaves());
    const auto ev = t.events();
    CHECK(snapshot(t, 0.5 * (ev[1].time + ev[2].time)).size() == 3);
    CHECK(snapshot(t, ev[1].time).size() == 3);
    CHECK_THROWS_AS(snapshot(t, 2.5), Error);
    CHECK_THROWS_AS(snapshot(t, -0.1), Error);
  }

  TEST_CASE("point location") {
    BspTree t(ConvexPolygon::unit_square(), 1.0);
    CHECK(locate(final_partition(t), {0.3, 0.3}) == 0);
    auto [below, above] = t.apply({0.5, 0, CutLine{M_PI, -0.5}});
    CHECK(locate(final_partition(t), {0.25, 0.5}) == above);  // -x > -0.5
    CHECK(locate(final_partition(t), {0.75, 0.5}) == below);
    CHECK(locate(final_partition(t), {0.5, 0.5}) == below);  // tie: lowest id
    CHECK_THROWS_AS(locate(final_partition(t), {1.5, 0.5}), Error);

    Rng rng(15);
    const BspTree r = sample_bsp(ConvexPolygon::unit_square(), 4.0, DirectionWeight::uniform(), rng);
    const PartitionSnapshot snap = final_partition(r);
    for (int i = 0; i < 10000; ++i) {
      const Point2 p{rng.uniform(), rng.uniform()};
      BlockId scan = kNoBlock;
      for (const Block& b : snap.blocks()) {
        if (oracle_inside(vertices_of(b.polygon), p, 0.0)) {
          scan = b.id;
          break;
        }
      }
      REQUIRE(scan != kNoBlock);
      CHECK(locate(snap, p) == scan);
      CHECK(locate(r, p) == scan);
    }
  }

  TEST_CASE("replay reproduces a tree and rejects bad events") {
    Rng rng(16);
    const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 2.0, DirectionWeight::uniform(), rng);
    CHECK(BspTree::replay(t.domain(), t.budget(), t.events()) == t);
    BspTree u(ConvexPolygon::unit_square(), 1.0);
    CHECK_THROWS_AS(u.apply({1.0, 0, CutLine{M_PI, -0.5}}), Error);  // at the budget
    CHECK_THROWS_AS(u.apply({0.5, 3, CutLine{M_PI, -0.5}}), Error);  // not a leaf
    u.apply({0.5, 0, CutLine{M_PI, -0.5}});
    CHECK_THROWS_AS(u.apply({0.4, 1, CutLine{M_PI / 2, 0.5}}), Error);  // time goes back
  }

  TEST_CASE("restriction: identity and a cut that misses") {
    Rng rng(17);
    const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 2.0, DirectionWeight::uniform(), rng);
    const BspTree same = restrict(t, t.domain());
    REQUIRE(same.num_cuts() == t.num_cuts());
    for (std::size_t k = 0; k < t.num_cuts(); ++k) CHECK(same.events()[k].time == t.events()[k].time);
    const auto a = t.leaf_ids();
    const auto b = same.leaf_ids();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(approx_equal(t.polygon(a[k]), same.polygon(b[k])));

    BspTree v(ConvexPolygon::unit_square(), 1.0);
    v.apply({0.3, 0, CutLine{M_PI, -0.5}});
    CHECK(restrict(v, ConvexPolygon::rectangle(0, 0, 0.4, 1)).num_cuts() == 0);
    CHECK_THROWS_AS(restrict(v, ConvexPolygon::rectangle(0.5, 0.5, 1.5, 1)), Error);
  }

  TEST_CASE("restricted leaves are the intersections with the subdomain") {
    Rng rng(18);
    for (int k = 0; k < 20; ++k) {
      const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 3.0, DirectionWeight::uniform(), rng);
      const BspTree r = restrict(t, kTriangle);
      CHECK(std::abs(leaf_area_sum(r) - kTriangle.area()) < 1e-9);
      for (int i = 0; i < 200; ++i) {
        const double u = rng.uniform(), v = rng.uniform();
        if (u + v >= 1.0) continue;
        const Point2 p{0.1 + 0.5 * u, 0.1 + 0.5 * v};
        const auto piece = intersect(t.polygon(locate(t, p)), kTriangle);
        REQUIRE(piece);
        CHECK(approx_equal(*piece, r.polygon(locate(r, p)), 1e-9));
      }
    }
  }

  TEST_CASE("extension restricts back to the original") {
    Rng rng(19);
    for (int k = 0; k < 50; ++k) {
      const BspTree small = sample_bsp(kTriangle, 3.0, DirectionWeight::uniform(), rng);
      const BspTree big = extend(small, ConvexPolygon::unit_square(), DirectionWeight::uniform(), rng);
      CHECK(big.budget() == small.budget());
      const BspTree back = restrict(big, kTriangle);
      REQUIRE(back.num_cuts() == small.num_cuts());
      for (std::size_t i = 0; i < small.num_cuts(); ++i) {
        CHECK(back.events()[i].time == small.events()[i].time);
      }
      const auto a = small.leaf_ids();
      const auto b = back.leaf_ids();
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(approx_equal(small.polygon(a[i]), back.polygon(b[i]), 1e-9));
      }
    }
  }

  TEST_CASE("extension of a prior draw is a prior draw on the domain") {
    Rng rng(20);
    const int n = 10000;
    std::vector<std::size_t> ext, direct;
    for (int i = 0; i < n; ++i) {
      const BspTree small = sample_bsp(kTriangle, 1.5, DirectionWeight::uniform(), rng);
      ext.push_back(extend(small, ConvexPolygon::unit_square(), DirectionWeight::uniform(), rng).num_leaves());
      direct.push_back(sample_bsp(ConvexPolygon::unit_square(), 1.5, DirectionWeight::uniform(), rng).num_leaves());
    }
    std::size_t top = 0;
    for (std::size_t v : ext) top = std::max(top, v);
    for (std::size_t v : direct) top = std::max(top, v);
    CHECK(stats::chi_square_two_sample(stats::histogram(ext, top + 1),
                                       stats::histogram(direct, top + 1)).p_value > 0.01);
  }

  TEST_CASE("lift branch fires with probability c(sub)/c(domain)") {
    Rng rng(21);
    const double budget = 1.5;
    const double cs = perimeter(kTriangle);
    const double cd = 4.0;
    const int n = 100000;
    int lifted = 0;
    for (int i = 0; i < n; ++i) {
      const BspTree small = sample_bsp(kTriangle, budget, DirectionWeight::uniform(), rng);
      const BspTree big = extend(small, ConvexPolygon::unit_square(), DirectionWeight::uniform(), rng);
      if (small.num_cuts() > 0 && big.num_cuts() > 0 &&
          big.events()[0].time == small.events()[0].time) {
        ++lifted;
      }
    }
    // First event on the domain happens before the budget and is the lift.
    const double expected = cs / cd * (1.0 - std::exp(-cd * budget));
    CHECK(std::abs(static_cast<double>(lifted) / n - expected) < 0.01);
  }
}
