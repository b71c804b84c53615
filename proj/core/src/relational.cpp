#include "bsp/relational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "bsp/error.hpp"

namespace bsp {
namespace {

// Position of each block id in a snapshot's (ascending) block list.
std::size_t block_index(const PartitionSnapshot& snap, BlockId id) {
  const auto blocks = snap.blocks();
  auto it = std::lower_bound(blocks.begin(), blocks.end(), id,
                             [](const Block& b, BlockId v) { return b.id < v; });
  return static_cast<std::size_t>(it - blocks.begin());
}

std::size_t locate_index(const PartitionSnapshot& snap, Point2 p) {
  return block_index(snap, locate(snap, p));
}

void check_coords(const RelationalDataset& ds, const Coordinates& coords) {
  if (coords.xi.size() != ds.n || coords.eta.size() != ds.n) {
    fail(ErrorKind::kInvalidArgument, "coordinate vectors must have n entries");
  }
  for (double v : coords.xi) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::kInvalidArgument, "coordinate outside [0,1]");
  }
  for (double v : coords.eta) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::kInvalidArgument, "coordinate outside [0,1]");
  }
}

// Training counts per block (index 0: non-links, index 1: links) and the
// block of every training entry (row-major; unused for other roles).
struct BlockTable {
  std::vector<std::array<std::uint32_t, 2>> counts;
  std::vector<std::size_t> block_of;
};

BlockTable tabulate(const RelationalDataset& ds, const Coordinates& coords,
                    const PartitionSnapshot& snap) {
  BlockTable t;
  t.counts.assign(snap.size(), {0, 0});
  t.block_of.assign(ds.n * ds.n, 0);
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < ds.n; ++j) {
      if (ds.role(i, j) != EntryRole::kTrain) continue;
      const std::size_t b = locate_index(snap, {coords.xi[i], coords.eta[j]});
      t.block_of[i * ds.n + j] = b;
      ++t.counts[b][ds.at(i, j)];
    }
  }
  return t;
}

// Collapsed log-probability of a group of entries given the counts of all
// other training entries: sum over touched blocks of
// evidence(others + group) - evidence(others).
class GroupScorer {
 public:
  explicit GroupScorer(const BlockLikelihood& lik) : lik_(lik) {}

  void clear() {
    for (std::size_t b : touched_) extra_[b] = {0, 0};
    touched_.clear();
  }
  void add(std::size_t block, std::uint8_t label) {
    if (extra_.size() <= block) extra_.resize(block + 1, {0, 0});
    if (extra_[block][0] == 0 && extra_[block][1] == 0) touched_.push_back(block);
    ++extra_[block][label];
  }
  double score(const std::vector<std::array<std::uint32_t, 2>>& others) const {
    double total = 0.0;
    for (std::size_t b : touched_) {
      const std::array<std::uint32_t, 2> base = others[b];
      const std::array<std::uint32_t, 2> with = {base[0] + extra_[b][0], base[1] + extra_[b][1]};
      total += lik_.block_log_evidence(with) - lik_.block_log_evidence(base);
    }
    return total;
  }

 private:
  const BlockLikelihood& lik_;
  std::vector<std::array<std::uint32_t, 2>> extra_;
  std::vector<std::size_t> touched_;
};

}  // namespace

double RelationalDataset::test_fraction() const {
  if (mask.empty()) return 0.0;
  const auto tests = std::count(mask.begin(), mask.end(), EntryRole::kTest);
  return static_cast<double>(tests) / static_cast<double>(mask.size());
}

void RelationalDataset::validate() const {
  if (n < 2) fail(ErrorKind::kInvalidArgument, "relational data needs n >= 2");
  if (entries.size() != n * n || mask.size() != n * n) {
    fail(ErrorKind::kInvalidArgument, "entries and mask must be n x n");
  }
  for (std::uint8_t v : entries) {
    if (v > 1) fail(ErrorKind::kInvalidArgument, "entries must be binary");
  }
}

std::pair<ToyDataset, BspTree> generate_toy(const ConvexPolygon& domain, double budget,
                                            const DirectionWeight& w,
                                            std::span<const double> dirichlet_alpha,
                                            std::span<const Point2> points, Rng& rng) {
  if (dirichlet_alpha.size() < 2) fail(ErrorKind::kInvalidArgument, "need at least two labels");
  for (double a : dirichlet_alpha) {
    if (!(a > 0.0)) fail(ErrorKind::kInvalidArgument, "Dirichlet parameters must be positive");
  }
  for (const Point2& p : points) {
    if (!contains(domain, p)) fail(ErrorKind::kPointOutsideDomain, "toy point outside the domain");
  }
  BspTree tree = sample_bsp(domain, budget, w, rng);
  std::unordered_map<BlockId, std::vector<double>> phi;
  for (BlockId id : tree.leaf_ids()) phi.emplace(id, rng.dirichlet(dirichlet_alpha));
  ToyDataset toy;
  toy.data.num_labels = static_cast<std::uint32_t>(dirichlet_alpha.size());
  toy.data.points.assign(points.begin(), points.end());
  toy.data.labels.reserve(points.size());
  for (const Point2& p : points) {
    toy.data.labels.push_back(static_cast<std::uint32_t>(rng.categorical(phi.at(locate(tree, p)))));
  }
  return {std::move(toy), std::move(tree)};
}

PlantedRelational generate_relational(std::size_t n, double budget, const DirectionWeight& w,
                                      double alpha0, double beta0, Rng& rng) {
  if (n < 2) fail(ErrorKind::kInvalidArgument, "relational data needs n >= 2");
  if (!(alpha0 > 0.0 && beta0 > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "Beta hyperparameters must be positive");
  }
  BspTree tree = sample_bsp(ConvexPolygon::unit_square(), budget, w, rng);
  std::unordered_map<BlockId, double> phi;
  for (BlockId id : tree.leaf_ids()) phi.emplace(id, rng.beta(alpha0, beta0));
  Coordinates coords;
  coords.xi.resize(n);
  coords.eta.resize(n);
  for (double& v : coords.xi) v = rng.uniform();
  for (double& v : coords.eta) v = rng.uniform();
  RelationalDataset ds;
  ds.n = n;
  ds.entries.resize(n * n);
  ds.mask.assign(n * n, EntryRole::kTrain);
  const PartitionSnapshot snap = final_partition(tree);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = phi.at(locate(snap, {coords.xi[i], coords.eta[j]}));
      ds.entries[i * n + j] = rng.bernoulli(p) ? 1 : 0;
    }
  }
  return {std::move(ds), std::move(coords), std::move(tree)};
}

void hold_out(RelationalDataset& dataset, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "hold-out fraction must be in [0, 1)");
  }
  std::vector<std::size_t> train;
  for (std::size_t k = 0; k < dataset.mask.size(); ++k) {
    if (dataset.mask[k] == EntryRole::kTrain) train.push_back(k);
  }
  const auto want = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(dataset.mask.size())));
  const std::size_t take = std::min(want, train.size());
  // Partial Fisher-Yates: the first `take` slots become a uniform subset.
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t r = k + rng.uniform_index(train.size() - k);
    std::swap(train[k], train[r]);
    dataset.mask[train[k]] = EntryRole::kTest;
  }
}

LabelledPoints training_points(const RelationalDataset& ds, const Coordinates& coords) {
  check_coords(ds, coords);
  LabelledPoints out;
  out.num_labels = 2;
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < ds.n; ++j) {
      if (ds.role(i, j) != EntryRole::kTrain) continue;
      out.points.push_back({coords.xi[i], coords.eta[j]});
      out.labels.push_back(ds.at(i, j));
    }
  }
  return out;
}

Coordinates mh_update_coordinates(const RelationalDataset& ds, const Coordinates& coords,
                                  const BspTree& tree, const BlockLikelihood& likelihood, Rng& rng,
                                  MhStats* stats) {
  ds.validate();
  check_coords(ds, coords);
  if (likelihood.kind() != BlockLikelihood::Kind::kBetaBernoulli) {
    fail(ErrorKind::kInvalidArgument, "coordinate updates need a Beta-Bernoulli likelihood");
  }
  const PartitionSnapshot snap = final_partition(tree);
  BlockTable table = tabulate(ds, coords, snap);
  Coordinates out = coords;
  GroupScorer scorer(likelihood);
  std::vector<std::size_t> proposed(ds.n);
  const std::size_t n = ds.n;

  // axis 0 moves xi_k (row k), axis 1 moves eta_k (column k).
  for (int axis = 0; axis < 2; ++axis) {
    for (std::size_t k = 0; k < n; ++k) {
      auto entry = [&](std::size_t m) { return axis == 0 ? k * n + m : m * n + k; };
      const double candidate = rng.uniform();
      for (std::size_t m = 0; m < n; ++m) {
        const std::size_t e = entry(m);
        if (ds.mask[e] != EntryRole::kTrain) continue;
        --table.counts[table.block_of[e]][ds.entries[e]];
        const Point2 p = axis == 0 ? Point2{candidate, out.eta[m]} : Point2{out.xi[m], candidate};
        proposed[m] = locate_index(snap, p);
      }
      scorer.clear();
      for (std::size_t m = 0; m < n; ++m) {
        const std::size_t e = entry(m);
        if (ds.mask[e] == EntryRole::kTrain) scorer.add(table.block_of[e], ds.entries[e]);
      }
      const double current = scorer.score(table.counts);
      scorer.clear();
      for (std::size_t m = 0; m < n; ++m) {
        const std::size_t e = entry(m);
        if (ds.mask[e] == EntryRole::kTrain) scorer.add(proposed[m], ds.entries[e]);
      }
      const double next = scorer.score(table.counts);
      const double log_ratio = next - current;
      const bool accept = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
      if (stats) {
        ++stats->proposals;
        if (accept) ++stats->accepted;
      }
      if (accept) (axis == 0 ? out.xi : out.eta)[k] = candidate;
      for (std::size_t m = 0; m < n; ++m) {
        const std::size_t e = entry(m);
        if (ds.mask[e] != EntryRole::kTrain) continue;
        if (accept) table.block_of[e] = proposed[m];
        ++table.counts[table.block_of[e]][ds.entries[e]];
      }
    }
  }
  return out;
}

std::vector<double> predict(const RelationalDataset& ds, const Coordinates& coords,
                            const BspTree& tree, double alpha0, double beta0) {
  ds.validate();
  check_coords(ds, coords);
  if (!(alpha0 > 0.0 && beta0 > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "Beta hyperparameters must be positive");
  }
  const PartitionSnapshot snap = final_partition(tree);
  const BlockTable table = tabulate(ds, coords, snap);
  std::vector<double> out(ds.n * ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < ds.n; ++j) {
      const std::size_t b = ds.role(i, j) == EntryRole::kTrain
                                ? table.block_of[i * ds.n + j]
                                : locate_index(snap, {coords.xi[i], coords.eta[j]});
      const auto& c = table.counts[b];
      out[i * ds.n + j] = (alpha0 + c[1]) / (alpha0 + beta0 + c[0] + c[1]);
    }
  }
  return out;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorKind::kInvalidArgument, "scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double rank = 0.5 * static_cast<double>(lo + 1 + hi);  // mean of lo+1..hi
    for (std::size_t k = lo; k < hi; ++k) {
      if (labels[order[k]]) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    lo = hi;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    fail(ErrorKind::kSingleClass, "AUC needs both positive and negative entries");
  }
  const double np = static_cast<double>(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

RelationalFit fit_relational(const RelationalDataset& dataset, const RelationalFitConfig& cfg,
                             const Rng& rng) {
  dataset.validate();
  const BlockLikelihood lik = BlockLikelihood::beta_bernoulli(cfg.alpha0, cfg.beta0);
  RelationalFit fit;
  Rng init = rng.split(Stream::kCoordinates, 0);
  fit.coords.xi.resize(dataset.n);
  fit.coords.eta.resize(dataset.n);
  for (double& v : fit.coords.xi) v = init.uniform();
  for (double& v : fit.coords.eta) v = init.uniform();

  const auto first_averaged = static_cast<std::size_t>(
      std::floor(cfg.average_from * static_cast<double>(cfg.iterations))) + 1;
  std::vector<double> sum(dataset.n * dataset.n, 0.0);
  std::size_t averaged = 0;
  std::size_t iteration = 0;
  std::vector<double> acceptance;

  const DataUpdate update = [&](const BspTree& tree, Rng& r, LabelledPoints& data) {
    ++iteration;
    MhStats stats;
    fit.coords = mh_update_coordinates(dataset, fit.coords, tree, lik, r, &stats);
    acceptance.push_back(stats.proposals
                             ? static_cast<double>(stats.accepted) /
                                   static_cast<double>(stats.proposals)
                             : 0.0);
    data = training_points(dataset, fit.coords);
    if (iteration >= first_averaged || iteration == cfg.iterations) {
      const auto p = predict(dataset, fit.coords, tree, cfg.alpha0, cfg.beta0);
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += p[k];
      ++averaged;
    }
  };
  auto records = gibbs_run(training_points(dataset, fit.coords), lik,
                           ConvexPolygon::unit_square(), cfg.csmc, cfg.iterations, rng, update);
  fit.trace.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    fit.trace.push_back({records[k].iteration, records[k].log_likelihood, records[k].num_blocks,
                         acceptance[k], std::move(records[k].tree)});
  }
  fit.scores.resize(sum.size());
  for (std::size_t k = 0; k < sum.size(); ++k) fit.scores[k] = sum[k] / static_cast<double>(averaged);
  return fit;
}

double test_auc(const RelationalDataset& dataset, std::span<const double> scores) {
  std::vector<double> s;
  std::vector<std::uint8_t> y;
  for (std::size_t k = 0; k < dataset.mask.size(); ++k) {
    if (dataset.mask[k] != EntryRole::kTest) continue;
    s.push_back(scores[k]);
    y.push_back(dataset.entries[k]);
  }
  return auc(s, y);
}

}  // namespace bsp
