#pragma once

#include <cstddef>
#include <vector>

#include "bsp/geometry.hpp"
#include "bsp/measure.hpp"
#include "bsp/process.hpp"
#include "bsp/rng.hpp"
#include "bsp/stats.hpp"

namespace bsp {

struct ConsistencyConfig {
  ConvexPolygon domain = ConvexPolygon::unit_square();
  ConvexPolygon sub = ConvexPolygon({{0.1, 0.1}, {0.6, 0.1}, {0.1, 0.6}});
  double budget = 2.0;
  DirectionWeight weight = DirectionWeight::uniform();
  std::size_t runs = 10'000;  // per arm
  std::size_t num_threads = 1;
  double significance = 0.01;
  RestrictionFault fault = RestrictionFault::kNone;
};

// Restrict-vs-direct comparison: arm A samples on the subdomain directly,
// arm B samples on the domain and restricts. Both arms record per-run leaf
// counts and first-cut times.
struct ConsistencyReport {
  stats::TestResult leaf_counts;  // two-sample chi-square on the histograms
  stats::TestResult cut_counts;   // two-sample KS on the number of cuts
  stats::TestResult first_cut;    // two-sample KS on first-cut times (runs with a cut)
  std::vector<std::size_t> direct_leaves;
  std::vector<std::size_t> restricted_leaves;
  bool passed = false;  // every p-value above the significance level
};

ConsistencyReport run_consistency(const ConsistencyConfig& cfg, const Rng& rng);

}  // namespace bsp
