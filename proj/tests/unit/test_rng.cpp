#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "bsp/error.hpp"
#include "bsp/rng.hpp"

using bsp::Rng;
using bsp::Stream;

TEST_SUITE("rng") {
  TEST_CASE("philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(Rng::philox(A4{0, 0, 0, 0}, A2{0, 0}) ==
          A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Rng::philox(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                      A2{0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Rng::philox(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      A2{0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("same seed, same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    Rng c(43);
    Rng d(42);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += c() == d();
    CHECK(same == 0);
  }

  TEST_CASE("split streams depend only on (purpose, index)") {
    const Rng root(7);
    Rng consumed(7);
    for (int i = 0; i < 10; ++i) consumed();
    // Splitting is keyed on the parent key, not on how much was consumed.
    CHECK(root.split(Stream::kTree, 3).key() == consumed.split(Stream::kTree, 3).key());
    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 1000; ++i) keys.insert(root.split(Stream::kCsmcExtend, i).key());
    for (std::uint64_t i = 0; i < 1000; ++i) keys.insert(root.split(Stream::kCsmcResample, i).key());
    CHECK(keys.size() == 2000);
  }

  TEST_CASE("uniform is in the open unit interval with the right moments") {
    Rng r(1);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform();
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
      sum += u;
      sq += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
  }

  TEST_CASE("gamma, beta and dirichlet means") {
    Rng r(2);
    const int n = 100000;
    for (double shape : {0.3, 1.0, 4.5}) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += r.gamma(shape);
      CHECK(sum / n == doctest::Approx(shape).epsilon(0.03));
    }
    double bsum = 0.0;
    for (int i = 0; i < n; ++i) bsum += r.beta(2.0, 5.0);
    CHECK(bsum / n == doctest::Approx(2.0 / 7.0).epsilon(0.02));
    const std::vector<double> alpha{1.0, 2.0, 3.0};
    std::vector<double> acc(3, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto d = r.dirichlet(alpha);
      CHECK(std::accumulate(d.begin(), d.end(), 0.0) == doctest::Approx(1.0));
      for (int k = 0; k < 3; ++k) acc[k] += d[k];
    }
    for (int k = 0; k < 3; ++k) CHECK(acc[k] / n == doctest::Approx(alpha[k] / 6.0).epsilon(0.02));
  }

  TEST_CASE("categorical frequencies and zero weights") {
    Rng r(3);
    const std::vector<double> w{0.0, 1.0, 3.0, 0.0};
    std::vector<int> hits(4, 0);
    for (int i = 0; i < 40000; ++i) ++hits[r.categorical(w)];
    CHECK(hits[0] == 0);
    CHECK(hits[3] == 0);
    CHECK(hits[2] / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
    const std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_AS(r.categorical(zero), bsp::Error);
  }

  TEST_CASE("uniform_index covers the range evenly") {
    Rng r(4);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 70000; ++i) ++hits[r.uniform_index(7)];
    for (int h : hits) CHECK(h == doctest::Approx(10000).epsilon(0.05));
  }

  TEST_CASE("exponential and normal moments") {
    Rng r(5);
    const int n = 200000;
    double es = 0.0, ns = 0.0, nq = 0.0;
    for (int i = 0; i < n; ++i) {
      es += r.exponential(4.0);
      const double z = r.normal();
      ns += z;
      nq += z * z;
    }
    CHECK(es / n == doctest::Approx(0.25).epsilon(0.02));
    CHECK(std::abs(ns / n) < 0.01);
    CHECK(nq / n == doctest::Approx(1.0).epsilon(0.02));
  }
}
