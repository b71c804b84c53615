#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace bsp {

// Purposes used when splitting streams. Values are part of the reproducibility
// contract: changing one changes every seeded output downstream of it.
enum class Stream : std::uint64_t {
  kTree = 1,
  kCsmcExtend = 2,
  kCsmcResample = 3,
  kCsmcFinal = 4,
  kGibbsInit = 5,
  kGibbsSweep = 6,
  kCoordinates = 7,
  kData = 8,
  kHarness = 9,
  kExtend = 10,
  kUser = 100,
};

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3"). The key identifies a stream; the counter
// indexes blocks of 128 output bits within it. split() derives a child key
// from (parent key, purpose, index) so that every worker can own a stream
// whose contents depend only on its logical position, never on scheduling.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  Rng split(Stream purpose, std::uint64_t index = 0) const;
  Rng split(std::uint64_t purpose, std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

  // Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p);
  double exponential(double rate);
  double normal();
  double normal(double mean, double sd);
  double gamma(double shape);
  double beta(double a, double b);
  std::vector<double> dirichlet(std::span<const double> alpha);
  // Index drawn with probability proportional to non-negative weights.
  std::size_t categorical(std::span<const double> weights);

  // Raw Philox4x32-10 bijection, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace bsp
