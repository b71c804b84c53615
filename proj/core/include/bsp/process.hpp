#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bsp/geometry.hpp"
#include "bsp/measure.hpp"
#include "bsp/rng.hpp"

namespace bsp {

using BlockId = std::uint64_t;
inline constexpr BlockId kNoBlock = std::numeric_limits<BlockId>::max();

// Hard cap on the number of cuts a single realization may contain.
inline constexpr std::size_t kMaxCuts = 1'000'000;

struct CutEvent {
  double time = 0.0;
  BlockId block_id = 0;
  CutLine cut;

  friend bool operator==(const CutEvent&, const CutEvent&) = default;
};

// Block ids are dense: the root is 0 and the k-th cut (0-based, in time order)
// creates children 2k+1 (below the cut) and 2k+2 (above it). A tree is fully
// determined by (domain, budget, events); leaves are rebuilt by replay.
class BspTree {
 public:
  BspTree(ConvexPolygon domain, double budget);

  static BspTree replay(ConvexPolygon domain, double budget, std::span<const CutEvent> events);

  const ConvexPolygon& domain() const { return nodes_.front().polygon; }
  double budget() const { return budget_; }
  std::span<const CutEvent> events() const { return events_; }
  std::size_t num_cuts() const { return events_.size(); }
  std::size_t num_leaves() const { return events_.size() + 1; }
  std::size_t num_nodes() const { return nodes_.size(); }

  const ConvexPolygon& polygon(BlockId id) const;
  bool is_leaf(BlockId id) const;
  // Index into events() of the cut applied to this block, if any.
  std::optional<std::size_t> cut_of(BlockId id) const;
  BlockId parent(BlockId id) const;

  // Leaf ids in ascending order.
  std::vector<BlockId> leaf_ids() const;

  // Appends a cut on a current leaf. Times must be strictly increasing and
  // below the budget. Returns the ids of the (below, above) children.
  std::pair<BlockId, BlockId> apply(const CutEvent& event);
  // Same, with the children already computed by the caller.
  std::pair<BlockId, BlockId> apply(const CutEvent& event, ConvexPolygon below,
                                    ConvexPolygon above);

  static BlockId below_child_id(std::size_t cut_index) { return 2 * cut_index + 1; }
  static BlockId above_child_id(std::size_t cut_index) { return 2 * cut_index + 2; }

  friend bool operator==(const BspTree&, const BspTree&) = default;

 private:
  struct Node {
    ConvexPolygon polygon;
    BlockId parent = kNoBlock;
    std::optional<std::size_t> cut;

    friend bool operator==(const Node&, const Node&) = default;
  };

  void check_event(const CutEvent& event) const;

  double budget_;
  std::vector<CutEvent> events_;
  std::vector<Node> nodes_;
};

struct Block {
  BlockId id = 0;
  ConvexPolygon polygon;
};

// The partition at one time point. When built by snapshot() it also carries
// the cut hierarchy so locate() can descend instead of scanning.
class PartitionSnapshot {
 public:
  PartitionSnapshot(double time, std::vector<Block> blocks);

  double time() const { return time_; }
  std::span<const Block> blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const ConvexPolygon& polygon(BlockId id) const;

 private:
  friend PartitionSnapshot snapshot(const BspTree& tree, double t);
  friend BlockId locate(const PartitionSnapshot& snap, Point2 p);

  struct Split {
    Point2 normal;
    double offset = 0.0;
    BlockId below = kNoBlock;
    BlockId above = kNoBlock;
  };

  double time_;
  std::vector<Block> blocks_;  // ascending id
  std::optional<ConvexPolygon> domain_;
  std::vector<std::optional<Split>> splits_;  // indexed by id; empty when scanning
};

// Partition with every event of time <= t applied (right-continuous).
// Throws kTimeOutOfRange unless 0 <= t <= budget.
PartitionSnapshot snapshot(const BspTree& tree, double t);
PartitionSnapshot final_partition(const BspTree& tree);

// Id of the leaf containing p; boundary ties go to the lowest id. Throws
// kPointOutsideDomain if no block contains p.
BlockId locate(const PartitionSnapshot& snap, Point2 p);

// Fast point location on the final partition of a tree using the same tie
// rule as locate().
BlockId locate(const BspTree& tree, Point2 p);

// Generative sampler. Waiting times are exponential with rate equal to the
// summed block measures, the block is chosen proportionally to its measure and
// the cut comes from sample_cut(). The first event at or past the budget is
// discarded and the process stops.
BspTree sample_bsp(const ConvexPolygon& domain, double budget, const DirectionWeight& w,
                   Rng& rng);

struct ClockDraw {
  BlockId block_id = 0;
  double waiting_time = 0.0;
};

// Global-clock draw of the next event of a partition: Exp(sum of measures)
// waiting time and a block chosen with probability measure / sum.
ClockDraw equivalent_global_clock(const PartitionSnapshot& partition, const DirectionWeight& w,
                                  Rng& rng);

// Index/time form used by the samplers: measures are per-block rates.
std::pair<std::size_t, double> global_clock(std::span<const double> measures, Rng& rng);

// Negative-control switch for restrict(). kDropOuterCuts deliberately loses
// every cut whose parent block is not inside the subdomain.
enum class RestrictionFault { kNone, kDropOuterCuts };

// Restriction of a realization on tree.domain() to a convex subdomain: every
// cut whose line crosses the current restricted block is kept with its time,
// the rest are dropped. Throws kSubdomainNotContained.
BspTree restrict(const BspTree& tree, const ConvexPolygon& sub,
                 RestrictionFault fault = RestrictionFault::kNone);

// Extension of a realization on a subdomain to a larger domain such that
// restrict(extend(T, D), T.domain()) reproduces T. Sub-tree cuts are lifted at
// their own times; extra cuts that avoid the subdomain arrive at rate
// c(leaf) - c(leaf ∩ sub). If T ~ sample_bsp(sub) then the result is
// distributed as sample_bsp(domain).
BspTree extend(const BspTree& tree_on_sub, const ConvexPolygon& domain, const DirectionWeight& w,
               Rng& rng);

struct SplitCut {
  CutLine cut;
  ConvexPolygon below;
  ConvexPolygon above;
};

// sample_cut() followed by split(), resampling the cut when floating point
// leaves a degenerate child (a probability-zero event of the continuous law).
SplitCut sample_split(const ConvexPolygon& poly, const DirectionWeight& w, Rng& rng);

// Sum of leaf perimeters.
double total_perimeter(const BspTree& tree);

}  // namespace bsp
