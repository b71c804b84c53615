#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bsp::stats {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double dof = 0.0;
};

// Pearson goodness of fit of observed bin counts against expected
// probabilities. Bins with expected count below `min_expected` are pooled
// with their neighbours before the statistic is formed.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities,
                          double min_expected = 5.0);

// Two-sample chi-square homogeneity test on two histograms over the same bins,
// pooling adjacent sparse bins (combined count below `min_count`).
TestResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                 double min_count = 10.0);

// One-sample Kolmogorov-Smirnov test against a continuous CDF.
TestResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov test (asymptotic distribution).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Upper tail of the Kolmogorov distribution, Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

// P(X > x) for a chi-square variable with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

// Integer histogram helper: counts[v] for v in [0, size), the last bin
// collecting everything at or above size - 1.
std::vector<double> histogram(std::span<const std::size_t> values, std::size_t size);

}  // namespace bsp::stats
