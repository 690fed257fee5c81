// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace ablab {

struct MeanStderr {
  double mean = 0;
  double std_error = 0;  // sample standard deviation / sqrt(n)
};

/// Pairwise-summed mean and standard error; deterministic for a given input.
MeanStderr mean_stderr(std::span<const double> xs);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // root-mean-square residual
};

/// Ordinary least squares y = slope * x + intercept (needs >= 2 points).
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov statistic of two sorted samples.
double ks_statistic(std::span<const double> sorted_a, std::span<const double> sorted_b);

/// Asymptotic 5% critical value 1.358 sqrt((n+m)/(n m)).
double ks_critical(std::size_t n, std::size_t m);

/// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> xs, double q);

}  // namespace ablab
