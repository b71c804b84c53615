#include "bsp/consistency.hpp"

#include <algorithm>

#include "bsp/error.hpp"
#include "bsp/parallel.hpp"

namespace bsp {

ConsistencyReport run_consistency(const ConsistencyConfig& cfg, const Rng& rng) {
  if (cfg.runs < 2) fail(ErrorKind::kInvalidArgument, "consistency needs at least two runs");
  const std::size_t runs = cfg.runs;
  std::vector<std::size_t> direct(runs), restricted(runs);
  std::vector<double> direct_first(runs, -1.0), restricted_first(runs, -1.0);

  parallel_for(0, 2 * runs, cfg.num_threads, [&](std::size_t k) {
    const std::size_t run = k / 2;
    Rng r = rng.split(Stream::kHarness, k);
    if (k % 2 == 0) {
      const BspTree t = sample_bsp(cfg.sub, cfg.budget, cfg.weight, r);
      direct[run] = t.num_leaves();
      if (t.num_cuts() > 0) direct_first[run] = t.events().front().time;
    } else {
      const BspTree big = sample_bsp(cfg.domain, cfg.budget, cfg.weight, r);
      const BspTree t = restrict(big, cfg.sub, cfg.fault);
      restricted[run] = t.num_leaves();
      if (t.num_cuts() > 0) restricted_first[run] = t.events().front().time;
    }
  });

  ConsistencyReport rep;
  const std::size_t top =
      std::max(*std::max_element(direct.begin(), direct.end()),
               *std::max_element(restricted.begin(), restricted.end())) + 1;
  rep.leaf_counts = stats::chi_square_two_sample(stats::histogram(direct, top),
                                                 stats::histogram(restricted, top));
  std::vector<double> a(direct.begin(), direct.end()), b(restricted.begin(), restricted.end());
  for (double& v : a) v -= 1.0;
  for (double& v : b) v -= 1.0;
  rep.cut_counts = stats::ks_two_sample(a, b);
  std::vector<double> fa, fb;
  for (double v : direct_first) {
    if (v >= 0.0) fa.push_back(v);
  }
  for (double v : restricted_first) {
    if (v >= 0.0) fb.push_back(v);
  }
  if (!fa.empty() && !fb.empty()) {
    rep.first_cut = stats::ks_two_sample(fa, fb);
  } else {
    rep.first_cut = {0.0, fa.empty() == fb.empty() ? 1.0 : 0.0, 0.0};
  }
  rep.direct_leaves = std::move(direct);
  rep.restricted_leaves = std::move(restricted);
  rep.passed = rep.leaf_counts.p_value > cfg.significance &&
               rep.cut_counts.p_value > cfg.significance &&
               rep.first_cut.p_value > cfg.significance;
  return rep;
}

}  // namespace bsp
