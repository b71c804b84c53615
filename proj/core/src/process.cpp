#include "bsp/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bsp/error.hpp"

namespace bsp {
namespace {

constexpr int kMaxCutResamples = 1000;
constexpr int kMaxGencutTrials = 1'000'000;

bool inside(const ConvexPolygon& outer, const ConvexPolygon& inner) {
  for (const Point2& p : inner.vertices()) {
    if (!contains(outer, p)) return false;
  }
  return true;
}

double clamp_gap(double gap, double scale) { return gap > 1e-12 * scale ? gap : 0.0; }

}  // namespace

SplitCut sample_split(const ConvexPolygon& poly, const DirectionWeight& w, Rng& rng) {
  for (int attempt = 0;; ++attempt) {
    const CutSample sample = sample_cut(poly, w, rng);
    try {
      auto [below, above] = split(poly, sample.cut);
      return {sample.cut, std::move(below), std::move(above)};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerateCut || attempt + 1 >= kMaxCutResamples) throw;
    }
  }
}

BspTree::BspTree(ConvexPolygon domain, double budget) : budget_(budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    fail(ErrorKind::kInvalidArgument, "budget must be positive and finite");
  }
  nodes_.push_back({std::move(domain), kNoBlock, std::nullopt});
}

BspTree BspTree::replay(ConvexPolygon domain, double budget, std::span<const CutEvent> events) {
  BspTree tree(std::move(domain), budget);
  for (const CutEvent& e : events) tree.apply(e);
  return tree;
}

const ConvexPolygon& BspTree::polygon(BlockId id) const {
  if (id >= nodes_.size()) fail(ErrorKind::kInvalidArgument, "unknown block id " + std::to_string(id));
  return nodes_[id].polygon;
}

bool BspTree::is_leaf(BlockId id) const {
  if (id >= nodes_.size()) fail(ErrorKind::kInvalidArgument, "unknown block id " + std::to_string(id));
  return !nodes_[id].cut.has_value();
}

std::optional<std::size_t> BspTree::cut_of(BlockId id) const {
  if (id >= nodes_.size()) fail(ErrorKind::kInvalidArgument, "unknown block id " + std::to_string(id));
  return nodes_[id].cut;
}

BlockId BspTree::parent(BlockId id) const {
  if (id >= nodes_.size()) fail(ErrorKind::kInvalidArgument, "unknown block id " + std::to_string(id));
  return nodes_[id].parent;
}

std::vector<BlockId> BspTree::leaf_ids() const {
  std::vector<BlockId> ids;
  ids.reserve(num_leaves());
  for (BlockId id = 0; id < nodes_.size(); ++id) {
    if (!nodes_[id].cut) ids.push_back(id);
  }
  return ids;
}

void BspTree::check_event(const CutEvent& event) const {
  if (!(event.time > 0.0) || !(event.time < budget_)) {
    fail(ErrorKind::kInvalidArgument, "event time " + std::to_string(event.time) +
                                          " outside (0, budget)");
  }
  if (!events_.empty() && !(event.time > events_.back().time)) {
    fail(ErrorKind::kInvalidArgument, "event times must be strictly increasing");
  }
  if (event.block_id >= nodes_.size() || nodes_[event.block_id].cut) {
    fail(ErrorKind::kInvalidArgument,
         "event targets block " + std::to_string(event.block_id) + " which is not a leaf");
  }
  if (!(event.cut.theta > 0.0 && event.cut.theta <= M_PI) || !std::isfinite(event.cut.offset)) {
    fail(ErrorKind::kInvalidArgument, "cut direction must lie in (0, pi]");
  }
}

std::pair<BlockId, BlockId> BspTree::apply(const CutEvent& event) {
  check_event(event);
  auto [below, above] = split(nodes_[event.block_id].polygon, event.cut);
  return apply(event, std::move(below), std::move(above));
}

std::pair<BlockId, BlockId> BspTree::apply(const CutEvent& event, ConvexPolygon below,
                                           ConvexPolygon above) {
  check_event(event);
  const std::size_t k = events_.size();
  if (events_.size() >= kMaxCuts) fail(ErrorKind::kRunawayProcess, "cut cap reached");
  events_.push_back(event);
  nodes_[event.block_id].cut = k;
  nodes_.push_back({std::move(below), event.block_id, std::nullopt});
  nodes_.push_back({std::move(above), event.block_id, std::nullopt});
  return {below_child_id(k), above_child_id(k)};
}

PartitionSnapshot::PartitionSnapshot(double time, std::vector<Block> blocks)
    : time_(time), blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end(),
            [](const Block& a, const Block& b) { return a.id < b.id; });
}

const ConvexPolygon& PartitionSnapshot::polygon(BlockId id) const {
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), id,
                             [](const Block& b, BlockId v) { return b.id < v; });
  if (it == blocks_.end() || it->id != id) {
    fail(ErrorKind::kInvalidArgument, "block " + std::to_string(id) + " not in partition");
  }
  return it->polygon;
}

PartitionSnapshot snapshot(const BspTree& tree, double t) {
  if (!(t >= 0.0) || !(t <= tree.budget())) {
    fail(ErrorKind::kTimeOutOfRange, "snapshot time " + std::to_string(t) + " outside [0, " +
                                         std::to_string(tree.budget()) + "]");
  }
  const auto events = tree.events();
  std::size_t applied = 0;
  while (applied < events.size() && events[applied].time <= t) ++applied;

  std::vector<PartitionSnapshot::Split> splits;
  const std::size_t live_nodes = 2 * applied + 1;
  std::vector<std::optional<PartitionSnapshot::Split>> table(live_nodes);
  std::vector<Block> blocks;
  blocks.reserve(applied + 1);
  for (BlockId id = 0; id < live_nodes; ++id) {
    const auto cut = tree.cut_of(id);
    if (cut && *cut < applied) {
      const CutLine& line = events[*cut].cut;
      table[id] = PartitionSnapshot::Split{line.normal(), line.offset,
                                           BspTree::below_child_id(*cut),
                                           BspTree::above_child_id(*cut)};
    } else {
      blocks.push_back({id, tree.polygon(id)});
    }
  }
  PartitionSnapshot snap(t, std::move(blocks));
  snap.domain_ = tree.domain();
  snap.splits_ = std::move(table);
  return snap;
}

PartitionSnapshot final_partition(const BspTree& tree) { return snapshot(tree, tree.budget()); }

BlockId locate(const PartitionSnapshot& snap, Point2 p) {
  BlockId best = kNoBlock;
  if (snap.splits_.empty()) {
    for (const Block& b : snap.blocks_) {
      if (b.id < best && contains(b.polygon, p)) best = b.id;
    }
  } else if (contains(*snap.domain_, p)) {
    // Descend, following both children when p is within tolerance of a cut.
    std::vector<BlockId> stack{0};
    while (!stack.empty()) {
      const BlockId id = stack.back();
      stack.pop_back();
      const auto& split = snap.splits_[id];
      if (!split) {
        if (id < best && contains(snap.polygon(id), p)) best = id;
        continue;
      }
      const double s = dot(p, split->normal) - split->offset;
      if (s <= kEpsGeom) stack.push_back(split->below);
      if (s >= -kEpsGeom) stack.push_back(split->above);
    }
  }
  if (best == kNoBlock) {
    fail(ErrorKind::kPointOutsideDomain,
         "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is not in any block");
  }
  return best;
}

BlockId locate(const BspTree& tree, Point2 p) {
  if (!contains(tree.domain(), p)) {
    fail(ErrorKind::kPointOutsideDomain,
         "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is outside the domain");
  }
  const auto events = tree.events();
  BlockId best = kNoBlock;
  std::vector<BlockId> stack{0};
  while (!stack.empty()) {
    const BlockId id = stack.back();
    stack.pop_back();
    const auto cut = tree.cut_of(id);
    if (!cut) {
      if (id < best && contains(tree.polygon(id), p)) best = id;
      continue;
    }
    const double s = events[*cut].cut.side(p);
    if (s <= kEpsGeom) stack.push_back(BspTree::below_child_id(*cut));
    if (s >= -kEpsGeom) stack.push_back(BspTree::above_child_id(*cut));
  }
  if (best == kNoBlock) {
    fail(ErrorKind::kPointOutsideDomain,
         "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is not in any block");
  }
  return best;
}

std::pair<std::size_t, double> global_clock(std::span<const double> measures, Rng& rng) {
  const double rate = std::accumulate(measures.begin(), measures.end(), 0.0);
  if (!(rate > 0.0)) fail(ErrorKind::kInvalidArgument, "total event rate must be positive");
  const double wait = rng.exponential(rate);
  const std::size_t k = rng.categorical(measures);
  return {k, wait};
}

ClockDraw equivalent_global_clock(const PartitionSnapshot& partition, const DirectionWeight& w,
                                  Rng& rng) {
  if (partition.size() == 0) fail(ErrorKind::kInvalidArgument, "empty partition");
  std::vector<double> measures;
  measures.reserve(partition.size());
  for (const Block& b : partition.blocks()) measures.push_back(block_measure(b.polygon, w));
  const auto [k, wait] = global_clock(measures, rng);
  return {partition.blocks()[k].id, wait};
}

BspTree sample_bsp(const ConvexPolygon& domain, double budget, const DirectionWeight& w,
                   Rng& rng) {
  BspTree tree(domain, budget);
  std::vector<BlockId> leaves{0};
  std::vector<double> measures{block_measure(domain, w)};
  double t = 0.0;
  for (;;) {
    if (std::accumulate(measures.begin(), measures.end(), 0.0) <= 0.0) break;
    const auto [k, wait] = global_clock(measures, rng);
    t += wait;
    if (t >= budget) break;
    if (tree.num_cuts() >= kMaxCuts) {
      fail(ErrorKind::kRunawayProcess, "more than " + std::to_string(kMaxCuts) + " cuts");
    }
    SplitCut s = sample_split(tree.polygon(leaves[k]), w, rng);
    const double mb = block_measure(s.below, w);
    const double ma = block_measure(s.above, w);
    const auto [below, above] = tree.apply({t, leaves[k], s.cut}, std::move(s.below),
                                           std::move(s.above));
    leaves[k] = below;
    measures[k] = mb;
    leaves.push_back(above);
    measures.push_back(ma);
  }
  return tree;
}

BspTree restrict(const BspTree& tree, const ConvexPolygon& sub, RestrictionFault fault) {
  if (!inside(tree.domain(), sub)) {
    fail(ErrorKind::kSubdomainNotContained, "restriction target is not inside the domain");
  }
  BspTree out(sub, tree.budget());
  // Original node id -> restricted node id (kNoBlock when the block misses sub).
  std::vector<BlockId> image(tree.num_nodes(), kNoBlock);
  image[0] = 0;
  const auto events = tree.events();
  for (std::size_t k = 0; k < events.size(); ++k) {
    const CutEvent& e = events[k];
    const BlockId below = BspTree::below_child_id(k);
    const BlockId above = BspTree::above_child_id(k);
    const BlockId r = image[e.block_id];
    if (r == kNoBlock) continue;
    const ConvexPolygon& piece = out.polygon(r);
    bool keep = crosses(piece, e.cut);
    if (keep && fault == RestrictionFault::kDropOuterCuts) {
      keep = inside(sub, tree.polygon(e.block_id));
    }
    if (keep) {
      try {
        auto [pb, pa] = split(piece, e.cut);
        const auto [rb, ra] = out.apply({e.time, r, e.cut}, std::move(pb), std::move(pa));
        image[below] = rb;
        image[above] = ra;
        continue;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::kDegenerateCut && err.kind() != ErrorKind::kCutMisses) throw;
      }
    }
    // The cut misses the restricted block, which then lies on one side.
    if (e.cut.side(centroid(piece)) < 0.0) {
      image[below] = r;
    } else {
      image[above] = r;
    }
  }
  return out;
}

BspTree extend(const BspTree& tree_on_sub, const ConvexPolygon& domain, const DirectionWeight& w,
               Rng& rng) {
  const ConvexPolygon& sub = tree_on_sub.domain();
  if (!inside(domain, sub)) {
    fail(ErrorKind::kSubdomainNotContained, "sub-tree domain is not inside the target domain");
  }
  const double budget = tree_on_sub.budget();
  BspTree out(domain, budget);

  struct Leaf {
    BlockId id;
    BlockId sub_id;  // kNoBlock when the leaf does not meet the subdomain
    double gap;      // c(leaf) - c(leaf ∩ sub): rate of cuts avoiding the subdomain
  };
  auto make_leaf = [&](BlockId id, BlockId sub_id) {
    const double c = block_measure(out.polygon(id), w);
    const double c_sub = sub_id == kNoBlock ? 0.0 : block_measure(tree_on_sub.polygon(sub_id), w);
    return Leaf{id, sub_id, clamp_gap(c - c_sub, c)};
  };

  std::vector<Leaf> leaves{make_leaf(0, 0)};
  // Sub-tree block id -> index into leaves.
  std::vector<std::size_t> holder(tree_on_sub.num_nodes(), 0);
  const auto sub_events = tree_on_sub.events();
  std::size_t next_sub = 0;
  double t = 0.0;
  for (;;) {
    double gap_rate = 0.0;
    for (const Leaf& l : leaves) gap_rate += l.gap;
    const double sigma = next_sub < sub_events.size() ? sub_events[next_sub].time
                                                      : std::numeric_limits<double>::infinity();
    const double gencut_time = gap_rate > 0.0 ? t + rng.exponential(gap_rate)
                                              : std::numeric_limits<double>::infinity();
    if (std::min(sigma, gencut_time) >= budget) break;
    if (out.num_cuts() >= kMaxCuts) fail(ErrorKind::kRunawayProcess, "extension cut cap reached");

    if (sigma <= gencut_time) {
      // Lift: the sub-tree's next cut, extended to the enclosing leaf.
      const CutEvent& e = sub_events[next_sub];
      const std::size_t idx = holder[e.block_id];
      const BlockId parent = leaves[idx].id;
      auto [pb, pa] = split(out.polygon(parent), e.cut);
      const auto [ob, oa] = out.apply({sigma, parent, e.cut}, std::move(pb), std::move(pa));
      const BlockId sb = BspTree::below_child_id(next_sub);
      const BlockId sa = BspTree::above_child_id(next_sub);
      leaves[idx] = make_leaf(ob, sb);
      holder[sb] = idx;
      leaves.push_back(make_leaf(oa, sa));
      holder[sa] = leaves.size() - 1;
      ++next_sub;
      t = sigma;
      continue;
    }

    // Gencut: a fresh cut that does not cross into the subdomain.
    std::vector<double> gaps;
    gaps.reserve(leaves.size());
    for (const Leaf& l : leaves) gaps.push_back(l.gap);
    const std::size_t idx = rng.categorical(gaps);
    const Leaf leaf = leaves[idx];
    const ConvexPolygon& poly = out.polygon(leaf.id);
    std::optional<SplitCut> chosen;
    for (int trial = 0; trial < kMaxGencutTrials && !chosen; ++trial) {
      SplitCut s = sample_split(poly, w, rng);
      if (leaf.sub_id == kNoBlock) {
        chosen = std::move(s);
      } else {
        const ProjectionSegment seg = project(tree_on_sub.polygon(leaf.sub_id), s.cut.theta);
        if (s.cut.offset <= seg.lo || s.cut.offset >= seg.hi) chosen = std::move(s);
      }
    }
    if (!chosen) fail(ErrorKind::kRunawayProcess, "no cut avoiding the subdomain was accepted");
    bool sub_below = false;
    if (leaf.sub_id != kNoBlock) {
      sub_below = chosen->cut.side(centroid(tree_on_sub.polygon(leaf.sub_id))) < 0.0;
    }
    const CutLine cut = chosen->cut;
    const auto [ob, oa] =
        out.apply({gencut_time, leaf.id, cut}, std::move(chosen->below), std::move(chosen->above));
    leaves[idx] = make_leaf(ob, sub_below ? leaf.sub_id : kNoBlock);
    leaves.push_back(make_leaf(oa, sub_below ? kNoBlock : leaf.sub_id));
    if (leaf.sub_id != kNoBlock) holder[leaf.sub_id] = sub_below ? idx : leaves.size() - 1;
    t = gencut_time;
  }
  return out;
}

double total_perimeter(const BspTree& tree) {
  double total = 0.0;
  for (BlockId id : tree.leaf_ids()) total += perimeter(tree.polygon(id));
  return total;
}

}  // namespace bsp
