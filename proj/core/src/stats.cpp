#include "bsp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "bsp/error.hpp"

namespace bsp::stats {
namespace {

// Greedy left-to-right pooling: bins are merged until `size(group)` reaches
// the threshold; a short trailing group joins its predecessor.
std::vector<std::vector<std::size_t>> pool_bins(std::span<const double> size, double threshold) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> current;
  double acc = 0.0;
  for (std::size_t i = 0; i < size.size(); ++i) {
    current.push_back(i);
    acc += size[i];
    if (acc >= threshold) {
      groups.push_back(std::move(current));
      current.clear();
      acc = 0.0;
    }
  }
  if (!current.empty()) {
    if (groups.empty()) {
      groups.push_back(std::move(current));
    } else {
      groups.back().insert(groups.back().end(), current.begin(), current.end());
    }
  }
  return groups;
}

double ks_statistic_to_p(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return kolmogorov_q((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

double chi_square_sf(double x, double dof) {
  if (dof <= 0.0) return 1.0;
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.0) {
    // Small-lambda form: P(K <= l) = sqrt(2 pi)/l * sum exp(-(2k-1)^2 pi^2 / (8 l^2)).
    const double c = -M_PI * M_PI / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      sum += std::exp(c * m * m);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities,
                          double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    fail(ErrorKind::kInvalidArgument, "observed and probabilities must match and be non-empty");
  }
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double psum = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (!(n > 0.0) || !(psum > 0.0)) fail(ErrorKind::kInvalidArgument, "empty sample or model");
  std::vector<double> expected(observed.size());
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = n * probabilities[i] / psum;
  const auto groups = pool_bins(expected, min_expected);
  TestResult r;
  for (const auto& g : groups) {
    double o = 0.0, e = 0.0;
    for (std::size_t i : g) {
      o += observed[i];
      e += expected[i];
    }
    if (e > 0.0) {
      r.statistic += (o - e) * (o - e) / e;
    } else if (o > 0.0) {
      r.statistic = INFINITY;
    }
  }
  r.dof = static_cast<double>(groups.size()) - 1.0;
  r.p_value = std::isinf(r.statistic) ? 0.0 : chi_square_sf(r.statistic, r.dof);
  return r;
}

TestResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                 double min_count) {
  if (a.size() != b.size() || a.empty()) {
    fail(ErrorKind::kInvalidArgument, "histograms must have the same non-zero size");
  }
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorKind::kInvalidArgument, "empty histogram");
  std::vector<double> total(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) total[i] = a[i] + b[i];
  const auto groups = pool_bins(total, min_count);
  TestResult r;
  const double n = na + nb;
  for (const auto& g : groups) {
    double oa = 0.0, ob = 0.0;
    for (std::size_t i : g) {
      oa += a[i];
      ob += b[i];
    }
    const double t = oa + ob;
    if (t <= 0.0) continue;
    const double ea = t * na / n;
    const double eb = t * nb / n;
    r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  r.dof = static_cast<double>(groups.size()) - 1.0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

TestResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) fail(ErrorKind::kInvalidArgument, "empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_statistic_to_p(d, n), 0.0};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::kInvalidArgument, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_statistic_to_p(d, na * nb / (na + nb)), 0.0};
}

std::vector<double> histogram(std::span<const std::size_t> values, std::size_t size) {
  if (size == 0) fail(ErrorKind::kInvalidArgument, "histogram needs at least one bin");
  std::vector<double> h(size, 0.0);
  for (std::size_t v : values) h[std::min(v, size - 1)] += 1.0;
  return h;
}

}  // namespace bsp::stats
