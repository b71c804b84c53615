#include "bsp/likelihood.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "bsp/error.hpp"

namespace bsp {
namespace {

// std::lgamma writes the global signgam; the boost version is safe to call
// from particle workers.
double lgam(double x) { return boost::math::lgamma(x); }

}  // namespace

double log_beta(double a, double b) { return lgam(a) + lgam(b) - lgam(a + b); }

BlockLikelihood BlockLikelihood::dirichlet_multinomial(std::vector<double> alpha) {
  if (alpha.size() < 2) fail(ErrorKind::kInvalidArgument, "Dirichlet needs at least two labels");
  BlockLikelihood l;
  l.kind_ = Kind::kDirichletMultinomial;
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      fail(ErrorKind::kInvalidArgument, "Dirichlet concentrations must be positive");
    }
  }
  l.alpha_sum_ = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  l.log_norm_ = -lgam(l.alpha_sum_);
  for (double a : alpha) l.log_norm_ += lgam(a);
  l.alpha_ = std::move(alpha);
  return l;
}

BlockLikelihood BlockLikelihood::beta_bernoulli(double alpha0, double beta0) {
  if (!(alpha0 > 0.0) || !(beta0 > 0.0) || !std::isfinite(alpha0) || !std::isfinite(beta0)) {
    fail(ErrorKind::kInvalidArgument, "Beta hyperparameters must be positive");
  }
  BlockLikelihood l;
  l.kind_ = Kind::kBetaBernoulli;
  l.alpha0_ = alpha0;
  l.beta0_ = beta0;
  l.alpha_ = {beta0, alpha0};
  l.alpha_sum_ = alpha0 + beta0;
  l.log_norm_ = log_beta(alpha0, beta0);
  return l;
}

std::size_t BlockLikelihood::num_labels() const { return alpha_.size(); }

double BlockLikelihood::block_log_evidence(std::span<const std::uint32_t> counts) const {
  if (counts.size() != alpha_.size()) {
    fail(ErrorKind::kInvalidArgument, "count vector does not match the number of labels");
  }
  if (kind_ == Kind::kBetaBernoulli) {
    if (counts[0] == 0 && counts[1] == 0) return 0.0;
    return log_beta(alpha0_ + counts[1], beta0_ + counts[0]) - log_norm_;
  }
  std::uint64_t n = 0;
  double log_num = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    n += counts[k];
    log_num += counts[k] ? lgam(alpha_[k] + counts[k]) : lgam(alpha_[k]);
  }
  if (n == 0) return 0.0;
  return log_num - lgam(alpha_sum_ + static_cast<double>(n)) - log_norm_;
}

double BlockLikelihood::log_predictive(std::span<const std::uint32_t> counts,
                                       std::uint32_t label) const {
  std::uint64_t n = 0;
  for (std::uint32_t c : counts) n += c;
  return std::log((alpha_[label] + counts[label]) / (alpha_sum_ + static_cast<double>(n)));
}

std::vector<std::vector<std::uint32_t>> block_counts(const PartitionSnapshot& snapshot,
                                                     const LabelledPoints& data) {
  std::vector<std::vector<std::uint32_t>> counts(
      snapshot.size(), std::vector<std::uint32_t>(data.num_labels, 0));
  const auto blocks = snapshot.blocks();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const BlockId id = locate(snapshot, data.points[i]);
    const auto it = std::lower_bound(blocks.begin(), blocks.end(), id,
                                     [](const Block& b, BlockId v) { return b.id < v; });
    const std::uint32_t label = data.labels[i];
    if (label >= data.num_labels) fail(ErrorKind::kInvalidArgument, "label out of range");
    ++counts[static_cast<std::size_t>(it - blocks.begin())][label];
  }
  return counts;
}

double log_marginal(const BlockLikelihood& likelihood, const PartitionSnapshot& snapshot,
                    const LabelledPoints& data) {
  if (data.num_labels != likelihood.num_labels()) {
    fail(ErrorKind::kInvalidArgument, "data and likelihood disagree on the number of labels");
  }
  double total = 0.0;
  for (const auto& c : block_counts(snapshot, data)) total += likelihood.block_log_evidence(c);
  return total;
}

}  // namespace bsp
