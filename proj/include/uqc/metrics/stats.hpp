// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uqc {

// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman's rho: Pearson correlation of average ranks. 0 if either side is
// constant.
double spearman_rho(std::span<const double> x, std::span<const double> y);

struct MannWhitneyResult {
  // U statistic of group A (number of (a, b) pairs with a > b, ties counting 1/2).
  double u_a = 0.0;
  double u_b = 0.0;
  double z = 0.0;
  // One-sided p-value for the alternative "A tends to be larger than B",
  // from the tie-corrected normal approximation with continuity correction.
  double p_greater = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

// Throws ArgumentError when either group has fewer than two samples.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> v);
// Population variance (divide by n).
double population_variance(std::span<const double> v);
// Sample standard deviation (divide by n-1); 0 for n < 2.
double sample_std(std::span<const double> v);

}  // namespace uqc
