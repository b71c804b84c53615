#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bsp/geometry.hpp"
#include "bsp/process.hpp"

namespace bsp {

// Points in the domain, each with a categorical label in [0, num_labels).
// Relational data binds to this as (xi_i, eta_j) -> R_ij with two labels.
struct LabelledPoints {
  std::vector<Point2> points;
  std::vector<std::uint32_t> labels;
  std::uint32_t num_labels = 2;

  std::size_t size() const { return points.size(); }
};

// Block-level observation model with its parameters integrated out.
class BlockLikelihood {
 public:
  enum class Kind { kDirichletMultinomial, kBetaBernoulli };

  static BlockLikelihood dirichlet_multinomial(std::vector<double> alpha);
  // Label 1 is a success (a link), label 0 a failure.
  static BlockLikelihood beta_bernoulli(double alpha0, double beta0);

  Kind kind() const { return kind_; }
  std::size_t num_labels() const;
  std::span<const double> alpha() const { return alpha_; }
  double alpha0() const { return alpha0_; }
  double beta0() const { return beta0_; }

  // log p(counts) for one block: log B(alpha + counts) - log B(alpha).
  double block_log_evidence(std::span<const std::uint32_t> counts) const;

  // Posterior predictive log-probability of one more observation of `label`.
  double log_predictive(std::span<const std::uint32_t> counts, std::uint32_t label) const;

 private:
  BlockLikelihood() = default;

  Kind kind_ = Kind::kBetaBernoulli;
  std::vector<double> alpha_;
  double alpha_sum_ = 0.0;
  double log_norm_ = 0.0;  // log B(alpha) (or log B(alpha0, beta0))
  double alpha0_ = 1.0;
  double beta0_ = 1.0;
};

// Collapsed evidence log P(X | partition): the sum over blocks of
// block_log_evidence of the labels located in each block.
double log_marginal(const BlockLikelihood& likelihood, const PartitionSnapshot& snapshot,
                    const LabelledPoints& data);

// Per-block label counts for the partition, keyed by position in
// snapshot.blocks().
std::vector<std::vector<std::uint32_t>> block_counts(const PartitionSnapshot& snapshot,
                                                     const LabelledPoints& data);

// log B(a, b) via lgamma.
double log_beta(double a, double b);

}  // namespace bsp
