// SPDX-License-Identifier: Apache-2.0
//
// Phase (Pruefer-type) recursion for the Bernoulli cocycle, the weak
// disorder Lyapunov formula, and Monte Carlo estimates of the exponent and
// its large deviations.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ablab/cocycle.hpp"

namespace ablab {

struct PasturParams {
  double kappa = 0;                  // E = 2 cos(kappa), kappa in (0, pi)
  std::complex<double> mu{1.0, 0.0};  // e^{2 i kappa}
};

struct PhaseState {
  std::complex<double> zeta{1.0, 0.0};  // e^{2 i phi}
  double phi = 0;                       // in [0, pi)

  static PhaseState from_zeta(std::complex<double> zeta);
};

struct LyapunovEstimate {
  double mean = 0;
  double std_error = 0;
  std::uint64_t n_steps = 0;
  std::uint64_t n_realizations = 0;
};

/// Throws Error("outside band") for |E| >= 2.
PasturParams kappa_of(double energy);

/// One step of the phase recursion with V = -eps / sin(kappa), followed by
/// renormalization of |zeta| to one. Throws Error("Pastur recursion
/// singular") if the denominator falls below 1e-12 in magnitude.
PhaseState zeta_step(const PasturParams& p, const PhaseState& s, double lambda, int sign);

/// Unrenormalized right-hand side of the recursion (exposed for the drift
/// diagnostics).
std::complex<double> zeta_step_raw(const PasturParams& p, std::complex<double> zeta,
                                   double lambda, int sign);

/// Vector whose growth the phase sum reproduces: with phi_1 = 0 the
/// recursion tracks M_N (1, 0)^T.
std::array<double, 2> matched_initial_vector();

/// (1/2N) sum_n log(1 + lambda V_n sin 2(phi_n + kappa)
///                   + lambda^2 V_n^2 sin^2(phi_n + kappa)),
/// with phases driven by zeta_step from phi_1 = 0.
double fp_lognorm(const DisorderConfig& cfg, const BernoulliWord& word);

/// lambda^2 / (2 (4 - E^2)) = lambda^2 / (8 sin^2 kappa).
double analytic_lyapunov(const DisorderConfig& cfg);

/// log|M_N| / N for each of R streams of `seed`, in stream order.
std::vector<double> lyapunov_samples(const DisorderConfig& cfg, std::uint64_t n_steps,
                                     std::uint64_t realizations, std::uint64_t seed);

/// Mean and standard error over realizations of log|M_N| / N. Requires N >= 1000.
LyapunovEstimate mc_lyapunov(const DisorderConfig& cfg, std::uint64_t n_steps,
                             std::uint64_t realizations, std::uint64_t seed);

struct DeviationTail {
  double a = 0;
  double probability = 0;  // fraction with |log|M_N|/N - L| > a L
  double bound = 0;        // exp(-(a^2/2) L N)
};

/// Fraction of `samples` (values of log|M_N|/N) deviating from L by more
/// than a*L. Monotone nonincreasing in a for a fixed sample.
double tail_fraction(const std::vector<double>& samples, double lyapunov, double a);

/// Uses the analytic exponent for L. Requires a >= 0 and R >= 1000.
DeviationTail deviation_tail(const DisorderConfig& cfg, std::uint64_t n_steps, double a,
                             std::uint64_t realizations, std::uint64_t seed);

/// Same sample set evaluated at several thresholds.
std::vector<DeviationTail> deviation_tails(const DisorderConfig& cfg, std::uint64_t n_steps,
                                           const std::vector<double>& a_values,
                                           std::uint64_t realizations, std::uint64_t seed);

}  // namespace ablab
