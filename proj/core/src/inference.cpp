#include "bsp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bsp/error.hpp"
#include "bsp/parallel.hpp"

namespace bsp {
namespace {

using LeafPtr = std::shared_ptr<const ParticleLeaf>;

LeafPtr make_leaf(BlockId id, ConvexPolygon polygon, std::vector<std::uint32_t> items,
                  const LabelledPoints& data, const BlockLikelihood& likelihood,
                  const DirectionWeight& w) {
  const double measure = block_measure(polygon, w);
  std::vector<std::uint32_t> counts(likelihood.num_labels(), 0);
  for (std::uint32_t i : items) ++counts[data.labels[i]];
  const double evidence = likelihood.block_log_evidence(counts);
  return std::make_shared<const ParticleLeaf>(ParticleLeaf{
      id, std::move(polygon), measure, std::move(items), std::move(counts), evidence});
}

// Splits leaf `pos` of the particle with `cut` at `time`. Points within the
// geometric tolerance of the line go below, matching locate()'s tie rule.
void apply_cut(Particle& p, std::size_t pos, double time, const CutLine& cut, ConvexPolygon below,
               ConvexPolygon above, const LabelledPoints& data,
               const BlockLikelihood& likelihood, const DirectionWeight& w) {
  const ParticleLeaf& parent = *p.leaves[pos];
  std::vector<std::uint32_t> lo, hi;
  for (std::uint32_t i : parent.items) {
    (cut.side(data.points[i]) <= kEpsGeom ? lo : hi).push_back(i);
  }
  const std::size_t k = p.events.size();
  LeafPtr a = make_leaf(BspTree::below_child_id(k), std::move(below), std::move(lo), data,
                        likelihood, w);
  LeafPtr b = make_leaf(BspTree::above_child_id(k), std::move(above), std::move(hi), data,
                        likelihood, w);
  p.log_weight += a->log_evidence + b->log_evidence - parent.log_evidence;
  p.events.push_back({time, parent.id, cut});
  p.elapsed = time;
  // New ids exceed every existing id, so appending keeps the order.
  p.leaves.erase(p.leaves.begin() + static_cast<std::ptrdiff_t>(pos));
  p.leaves.push_back(std::move(a));
  p.leaves.push_back(std::move(b));
}

void replay_step(Particle& p, const CutEvent& event, const LabelledPoints& data,
                 const BlockLikelihood& likelihood, const DirectionWeight& w) {
  auto it = std::find_if(p.leaves.begin(), p.leaves.end(),
                         [&](const LeafPtr& l) { return l->id == event.block_id; });
  if (it == p.leaves.end()) {
    fail(ErrorKind::kInvalidArgument, "reference event targets a block that is not a leaf");
  }
  auto [below, above] = split((*it)->polygon, event.cut);
  apply_cut(p, static_cast<std::size_t>(it - p.leaves.begin()), event.time, event.cut,
            std::move(below), std::move(above), data, likelihood, w);
}

void generative_step(Particle& p, double budget, const LabelledPoints& data,
                     const BlockLikelihood& likelihood, const DirectionWeight& w, Rng& rng) {
  std::vector<double> measures(p.leaves.size());
  for (std::size_t i = 0; i < p.leaves.size(); ++i) measures[i] = p.leaves[i]->measure;
  const double rate = std::accumulate(measures.begin(), measures.end(), 0.0);
  if (!(rate > 0.0)) {
    p.frozen = true;
    return;
  }
  const double t = p.elapsed + rng.exponential(rate);
  if (t >= budget) {
    p.frozen = true;
    return;
  }
  if (p.events.size() >= kMaxCuts) fail(ErrorKind::kRunawayProcess, "cut cap exceeded");
  const std::size_t k = rng.categorical(measures);
  SplitCut s = sample_split(p.leaves[k]->polygon, w, rng);
  apply_cut(p, k, t, s.cut, std::move(s.below), std::move(s.above), data, likelihood, w);
}

// Normalises log weights in place into probabilities; returns |sum - 1|.
double normalise(std::span<const double> log_w, std::vector<double>& out) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : log_w) {
    if (std::isnan(v)) fail(ErrorKind::kAllWeightsZero, "NaN particle weight");
    top = std::max(top, v);
  }
  if (!std::isfinite(top)) fail(ErrorKind::kAllWeightsZero, "every particle weight vanished");
  out.resize(log_w.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) sum += out[i] = std::exp(log_w[i] - top);
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    fail(ErrorKind::kAllWeightsZero, "weight normalisation failed");
  }
  double check = 0.0;
  for (double& v : out) check += v /= sum;
  return std::abs(check - 1.0);
}

}  // namespace

BspTree Particle::tree(const ConvexPolygon& domain, double budget) const {
  return BspTree::replay(domain, budget, events);
}

double Particle::log_likelihood() const {
  double total = 0.0;
  for (const auto& l : leaves) total += l->log_evidence;
  return total;
}

CsmcSweepResult csmc_sweep_detailed(const LabelledPoints& data, const BlockLikelihood& likelihood,
                                    const CsmcConfig& cfg, const BspTree& reference,
                                    const Rng& rng) {
  const std::size_t C = cfg.num_particles;
  if (C < 1) fail(ErrorKind::kInvalidArgument, "num_particles must be at least 1");
  if (!(cfg.budget > 0.0) || !std::isfinite(cfg.budget)) {
    fail(ErrorKind::kInvalidArgument, "budget must be positive and finite");
  }
  if (std::abs(reference.budget() - cfg.budget) > 1e-12 * cfg.budget) {
    fail(ErrorKind::kInvalidArgument, "reference budget differs from the configured budget");
  }
  if (data.labels.size() != data.points.size()) {
    fail(ErrorKind::kInvalidArgument, "labels and points differ in length");
  }
  if (data.num_labels != likelihood.num_labels()) {
    fail(ErrorKind::kInvalidArgument, "label alphabet does not match the likelihood");
  }
  std::vector<std::size_t> streams(C, 0);
  for (std::size_t c = 1; c < C; ++c) streams[c] = c;
  if (!cfg.stream_order.empty()) {
    if (cfg.stream_order.size() != C - 1) {
      fail(ErrorKind::kInvalidArgument, "stream_order must have num_particles - 1 entries");
    }
    for (std::size_t c = 1; c < C; ++c) streams[c] = cfg.stream_order[c - 1];
  }

  const ConvexPolygon& domain = reference.domain();
  std::vector<std::uint32_t> all(data.size());
  std::iota(all.begin(), all.end(), 0u);
  for (std::uint32_t i : all) {
    if (data.labels[i] >= data.num_labels) fail(ErrorKind::kInvalidArgument, "label out of range");
    if (!contains(domain, data.points[i])) {
      fail(ErrorKind::kPointOutsideDomain, "data point outside the domain");
    }
  }

  Particle root;
  root.leaves.push_back(make_leaf(0, domain, std::move(all), data, likelihood, cfg.weight));
  std::vector<Particle> particles(C, root);
  const auto ref_events = reference.events();

  CsmcSweepResult result{BspTree(domain, cfg.budget), BspTree(domain, cfg.budget), 0, 0.0, {}, {}, 0};
  result.first_stage.assign(C, std::nullopt);
  std::vector<double> log_w(C), w;

  for (std::size_t stage = 1;; ++stage) {
    const bool any_active = std::any_of(particles.begin(), particles.end(),
                                        [](const Particle& p) { return !p.frozen; });
    if (!any_active) break;
    result.stages = stage;

    Particle& ref = particles[0];
    if (!ref.frozen) {
      if (stage <= ref_events.size()) {
        replay_step(ref, ref_events[stage - 1], data, likelihood, cfg.weight);
      } else {
        ref.frozen = true;
      }
    }
    const Rng stage_rng = rng.split(Stream::kCsmcExtend, stage);
    parallel_for(1, C, cfg.num_threads, [&](std::size_t c) {
      Particle& p = particles[c];
      if (p.frozen) return;
      Rng r = stage_rng.split(Stream::kCsmcExtend, streams[c]);
      generative_step(p, cfg.budget, data, likelihood, cfg.weight, r);
    });
    if (stage == 1) {
      for (std::size_t c = 0; c < C; ++c) {
        if (!particles[c].events.empty()) result.first_stage[c] = particles[c].events.front();
      }
    }

    for (std::size_t c = 0; c < C; ++c) log_w[c] = particles[c].log_weight;
    result.max_normalisation_error =
        std::max(result.max_normalisation_error, normalise(log_w, w));

    const bool all_frozen = std::all_of(particles.begin(), particles.end(),
                                        [](const Particle& p) { return p.frozen; });
    if (all_frozen) break;

    Rng resample_rng = rng.split(Stream::kCsmcResample, stage);
    std::vector<Particle> next;
    next.reserve(C);
    next.push_back(particles[0]);  // j_1 = 1: the reference survives
    for (std::size_t c = 1; c < C; ++c) next.push_back(particles[resample_rng.categorical(w)]);
    for (auto& p : next) p.log_weight = 0.0;
    particles = std::move(next);
  }

  if (w.empty()) {
    for (std::size_t c = 0; c < C; ++c) log_w[c] = particles[c].log_weight;
    normalise(log_w, w);
  }
  Rng final_rng = rng.split(Stream::kCsmcFinal);
  result.selected = final_rng.categorical(w);
  result.terminal_weights = w;
  result.tree = particles[result.selected].tree(domain, cfg.budget);
  result.conditioned = particles[0].tree(domain, cfg.budget);
  return result;
}

BspTree csmc_sweep(const LabelledPoints& data, const BlockLikelihood& likelihood,
                   const CsmcConfig& cfg, const BspTree& reference, const Rng& rng) {
  return csmc_sweep_detailed(data, likelihood, cfg, reference, rng).tree;
}

std::vector<GibbsRecord> gibbs_run(LabelledPoints data, const BlockLikelihood& likelihood,
                                   const ConvexPolygon& domain, const CsmcConfig& cfg,
                                   std::size_t iterations, const Rng& rng,
                                   const DataUpdate& update, std::optional<BspTree> initial) {
  if (iterations < 1) fail(ErrorKind::kInvalidArgument, "iterations must be at least 1");
  BspTree current = [&] {
    if (initial) return std::move(*initial);
    Rng init = rng.split(Stream::kGibbsInit);
    return sample_bsp(domain, cfg.budget, cfg.weight, init);
  }();
  std::vector<GibbsRecord> trace;
  trace.reserve(iterations);
  for (std::size_t t = 1; t <= iterations; ++t) {
    current = csmc_sweep(data, likelihood, cfg, current, rng.split(Stream::kGibbsSweep, t));
    if (update) {
      Rng r = rng.split(Stream::kCoordinates, t);
      update(current, r, data);
    }
    const double ll = log_marginal(likelihood, final_partition(current), data);
    trace.push_back({t, ll, current.num_leaves(), current});
  }
  return trace;
}

}  // namespace bsp
