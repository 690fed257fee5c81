// SPDX-License-Identifier: Apache-2.0
//
// Integrated density of states by finite-volume eigenvalue counting, and
// Hoelder-exponent fits of the resulting curves.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ablab {

/// Number of eigenvalues below E of the tridiagonal matrix with the given
/// diagonal and unit off-diagonal (Dirichlet ends), by Sturm sequences.
std::uint64_t sturm_count(std::span<const double> diagonal, double energy);

struct IdsCurve {
  std::vector<double> grid;        // increasing energies
  std::vector<double> values;      // mean N(E)
  std::vector<double> std_errors;  // per grid point
  std::size_t box_size = 0;
  std::uint64_t realizations = 0;
  /// Per-realization eigenvalue counts, row-major realizations x grid. Empty
  /// for curves that were not sampled (then all errors are zero).
  std::vector<std::uint32_t> counts;

  /// Standard error of values[j] - values[i], from per-realization differences.
  double increment_stderr(std::size_t i, std::size_t j) const;
};

/// N(E) = (1/L) #{eigenvalues < E} of H = Delta + lambda V on L sites, averaged
/// over R Bernoulli potentials. Requires L >= 500 and R >= 50.
IdsCurve ids_curve(double disorder, std::span<const double> grid, std::size_t box_size,
                   std::uint64_t realizations, std::uint64_t seed);

/// lo, lo + pitch, ..., up to hi (inclusive within rounding).
std::vector<double> uniform_grid(double lo, double hi, double pitch);

/// Free-lattice IDS 1 - arccos(E/2)/pi on [-2, 2].
double free_ids(double energy);

struct HolderFit {
  double exponent = 0;
  double residual = 0;
  std::vector<double> h;           // dyadic half-widths used
  std::vector<double> increments;  // max over centers of N(E+h) - N(E-h)
  std::vector<double> centers;
};

/// Slope of log[N(E+h) - N(E-h)] against log h over h = h_low 2^k <= h_high,
/// taking at each h the largest increment over the given centers. Every
/// E +- h must be a grid point. Throws Error("statistically unresolved;
/// increase L*R") if an increment is below twice its standard error.
HolderFit holder_fit(const IdsCurve& curve, std::span<const double> centers, double h_low,
                     double h_high);

/// 2 log 2 / arccosh(1 + lambda), lambda > 0.
double halperin_alpha(double disorder);

}  // namespace ablab
