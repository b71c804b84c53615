#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bsp/inference.hpp"
#include "bsp/likelihood.hpp"
#include "bsp/measure.hpp"
#include "bsp/process.hpp"
#include "bsp/rng.hpp"

namespace bsp {

enum class EntryRole : std::uint8_t { kTrain = 0, kTest = 1, kMissing = 2 };

// Square binary relation R (row-major n x n) with a role for every entry.
struct RelationalDataset {
  std::size_t n = 0;
  std::vector<std::uint8_t> entries;
  std::vector<EntryRole> mask;

  std::uint8_t at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
  EntryRole role(std::size_t i, std::size_t j) const { return mask[i * n + j]; }
  double test_fraction() const;
  void validate() const;
};

// Latent row (xi) and column (eta) coordinates in [0, 1].
struct Coordinates {
  std::vector<double> xi;
  std::vector<double> eta;
};

struct ToyDataset {
  LabelledPoints data;
};

// Labels from a planted partition: tree ~ sample_bsp, phi_k ~ Dirichlet(alpha)
// per leaf, z_i ~ Categorical(phi at the leaf containing point i).
std::pair<ToyDataset, BspTree> generate_toy(const ConvexPolygon& domain, double budget,
                                            const DirectionWeight& w,
                                            std::span<const double> dirichlet_alpha,
                                            std::span<const Point2> points, Rng& rng);

struct PlantedRelational {
  RelationalDataset dataset;
  Coordinates coords;
  BspTree tree;
};

// Tree on the unit square, phi_k ~ Beta(alpha0, beta0), coordinates uniform,
// R_ij ~ Bernoulli(phi at (xi_i, eta_j)). Every entry is a training entry;
// see hold_out() for masking.
PlantedRelational generate_relational(std::size_t n, double budget, const DirectionWeight& w,
                                      double alpha0, double beta0, Rng& rng);

// Marks round(fraction * n^2) uniformly chosen entries as test entries.
void hold_out(RelationalDataset& dataset, double fraction, Rng& rng);

// Training entries as points (xi_i, eta_j) labelled R_ij, in row-major order.
LabelledPoints training_points(const RelationalDataset& dataset, const Coordinates& coords);

struct MhStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};

// One Metropolis-Hastings sweep over the coordinates: xi_0..xi_{n-1} then
// eta_0..eta_{n-1}, each with a U[0,1] proposal accepted with the collapsed
// Beta-Bernoulli likelihood ratio of that row (column) given every other
// training entry.
Coordinates mh_update_coordinates(const RelationalDataset& dataset, const Coordinates& coords,
                                  const BspTree& tree, const BlockLikelihood& likelihood, Rng& rng,
                                  MhStats* stats = nullptr);

// Posterior-mean link probability (alpha0 + n1) / (alpha0 + beta0 + n0 + n1)
// with counts over the training entries of the block containing (xi_i, eta_j).
// Row-major n x n.
std::vector<double> predict(const RelationalDataset& dataset, const Coordinates& coords,
                            const BspTree& tree, double alpha0, double beta0);

// Mann-Whitney AUC with average ranks for ties. Throws kSingleClass unless
// both labels occur.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct RelationalFitConfig {
  CsmcConfig csmc;
  std::size_t iterations = 100;
  double alpha0 = 0.5;
  double beta0 = 0.5;
  // Predictions are averaged over the last `burn_fraction` .. end of the trace
  // (the second half by default).
  double average_from = 0.5;
};

struct RelationalIteration {
  std::size_t iteration = 0;
  double train_log_likelihood = 0.0;  // collapsed evidence of training entries
  std::size_t num_blocks = 0;
  double acceptance_rate = 0.0;
  BspTree tree;
};

struct RelationalFit {
  std::vector<RelationalIteration> trace;
  Coordinates coords;
  std::vector<double> scores;  // averaged predictions, row-major
};

// Alternates csmc_sweep on the training entries with mh_update_coordinates.
// Coordinates start uniform (stream kCoordinates, index 0).
RelationalFit fit_relational(const RelationalDataset& dataset, const RelationalFitConfig& cfg,
                             const Rng& rng);

// Held-out AUC of row-major scores over the test entries.
double test_auc(const RelationalDataset& dataset, std::span<const double> scores);

}  // namespace bsp
