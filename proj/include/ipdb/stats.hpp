#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ipdb::stats {

// Two-sided Hoeffding half-width for the mean of n samples in [0,1]:
// sqrt(ln(2 / (1 - confidence)) / (2 n)).
double hoeffding_half_width(std::uint64_t n, double confidence);

double poisson_pmf(std::uint64_t k, double rate);

struct ChiSquareFit {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  bool pass = true;  // p_value >= significance
};

// Goodness of fit of observed counts to Poisson(rate). Bins 0..K-1 are kept
// while their expected count is at least 5; the rest is pooled into one
// upper-tail bin.
ChiSquareFit chi_square_poisson(std::span<const std::uint64_t> counts, double rate,
                                double significance);

struct CovarianceCheck {
  double covariance = 0;
  double std_error = 0;
  double z = 0;  // covariance / std_error
};

// Sample covariance with a plug-in standard error from the products
// (x - mean x)(y - mean y).
CovarianceCheck covariance(std::span<const double> x, std::span<const double> y);

}  // namespace ipdb::stats
