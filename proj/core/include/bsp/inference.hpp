#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "bsp/likelihood.hpp"
#include "bsp/measure.hpp"
#include "bsp/process.hpp"
#include "bsp/rng.hpp"

namespace bsp {

struct CsmcConfig {
  // C. One particle degenerates to replaying the reference path.
  std::size_t num_particles = 20;
  double budget = 1.0;
  DirectionWeight weight = DirectionWeight::uniform();
  // Worker threads for the per-stage extension; output never depends on it.
  std::size_t num_threads = 1;
  // Optional stream relabelling for particles 2..C: slot c (0-based, c >= 1)
  // draws from stream stream_order[c - 1]. Empty means the identity. Used to
  // audit that particles are exchangeable.
  std::vector<std::size_t> stream_order;
};

// One leaf of a particle's partition together with the data it holds. Leaves
// are immutable and shared between particles after resampling.
struct ParticleLeaf {
  BlockId id = 0;
  ConvexPolygon polygon;
  double measure = 0.0;
  std::vector<std::uint32_t> items;
  std::vector<std::uint32_t> counts;
  double log_evidence = 0.0;
};

// One C-SMC hypothesis: a partial tree (its events up to the current stage),
// the time of its last event, its unnormalised log weight and whether it has
// run past the budget.
struct Particle {
  std::vector<CutEvent> events;
  std::vector<std::shared_ptr<const ParticleLeaf>> leaves;  // ascending id
  double elapsed = 0.0;
  double log_weight = 0.0;
  bool frozen = false;

  BspTree tree(const ConvexPolygon& domain, double budget) const;
  double log_likelihood() const;
};

struct CsmcSweepResult {
  BspTree tree;         // draw from the terminal weighted particle set
  BspTree conditioned;  // terminal state of the reference particle
  std::size_t stages = 0;
  // Largest |sum of normalised weights - 1| seen over all stages.
  double max_normalisation_error = 0.0;
  // Event proposed by each particle at stage 1 (nullopt when it froze).
  std::vector<std::optional<CutEvent>> first_stage;
  std::vector<double> terminal_weights;  // normalised
  std::size_t selected = 0;              // index drawn from terminal_weights
};

// One conditional-SMC sweep. Particle 1 replays the reference's events one
// per stage; particles 2..C extend by one generative event each (or freeze on
// overshooting the budget). Weights are updated by the change in collapsed
// evidence, normalised in log space and multinomially resampled every stage
// with particle 1 pinned. Once every particle is frozen the output is drawn
// from the weighted particle set.
CsmcSweepResult csmc_sweep_detailed(const LabelledPoints& data, const BlockLikelihood& likelihood,
                                    const CsmcConfig& cfg, const BspTree& reference,
                                    const Rng& rng);

BspTree csmc_sweep(const LabelledPoints& data, const BlockLikelihood& likelihood,
                   const CsmcConfig& cfg, const BspTree& reference, const Rng& rng);

struct GibbsRecord {
  std::size_t iteration = 0;  // 1-based
  double log_likelihood = 0.0;
  std::size_t num_blocks = 0;
  BspTree tree;
};

// Optional per-iteration update of the data given the new tree (for example
// moving latent coordinates). It may rewrite the points in place.
using DataUpdate = std::function<void(const BspTree& tree, Rng& rng, LabelledPoints& data)>;

// Iterated csmc_sweep conditioned on the previous draw. The first reference
// is a prior draw unless `initial` is given. Each record carries the collapsed
// training log-likelihood after the iteration's updates.
std::vector<GibbsRecord> gibbs_run(LabelledPoints data, const BlockLikelihood& likelihood,
                                   const ConvexPolygon& domain, const CsmcConfig& cfg,
                                   std::size_t iterations, const Rng& rng,
                                   const DataUpdate& update = {},
                                   std::optional<BspTree> initial = std::nullopt);

}  // namespace bsp
