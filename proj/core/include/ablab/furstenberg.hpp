// SPDX-License-Identifier: Apache-2.0
//
// Stationary measure of the Bernoulli cocycle on the projective line:
// sampling, stationarity residuals, interval masses, correlation dimension,
// stopping-time renormalization of the step distribution, and the
// distribution of eigendirections of long products.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ablab/cocycle.hpp"
#include "ablab/rng.hpp"

namespace ablab {

/// Sorted sample of directions (angles in [0, pi)).
struct EmpiricalMeasure {
  std::vector<double> samples;
  std::optional<DisorderConfig> cfg;
  std::uint64_t burnin = 0;
  std::uint64_t seed = 0;

  std::size_t count() const { return samples.size(); }
  /// Reduces every angle mod pi and sorts.
  static EmpiricalMeasure from_angles(std::vector<double> angles);
  /// Fraction of samples in the arc [start, start + length) mod pi.
  double mass(double start, double length) const;
};

/// Finitely supported probability measure on SL2(R).
struct DiscreteSl2Measure {
  struct Atom {
    Sl2 g;
    double weight = 0;
    int word_length = 0;
  };
  std::vector<Atom> atoms;
  int max_word_length = 0;
  /// Weight of atoms stopped by a depth cap rather than by the norm rule.
  double unresolved_weight = 0;

  double total_weight() const;
  /// 1/2 delta_{g+} + 1/2 delta_{g-}.
  static DiscreteSl2Measure bernoulli(const DisorderConfig& cfg);
};

struct DimensionEstimate {
  double value = 0;
  double ci_low = 0;
  double ci_high = 0;
  double scale_low = 0;  // smallest radius used
  double scale_high = 0;
  int scales_used = 0;
  double residual = 0;  // rms residual of the log-log fit
};

struct IntervalMassProfile {
  std::vector<double> radii;
  std::vector<double> masses;
};

/// Lower bound on the burn-in, 10 / analytic exponent.
std::uint64_t minimum_burnin(const DisorderConfig& cfg);

/// M independent streams; stream i contributes act(M_{N_b}(eps^(i)), theta0).
/// Throws if N_b < minimum_burnin(cfg) or M < 1000.
EmpiricalMeasure sample_stationary(const DisorderConfig& cfg, std::uint64_t burnin,
                                   std::uint64_t count, std::uint64_t seed,
                                   Direction theta0 = Direction(0.0));

/// Empirical Fourier coefficients nu(e^{2ik theta}) for k = 1..k_max.
std::vector<std::complex<double>> fourier_coefficients(const EmpiricalMeasure& m, int k_max);

/// max_{1<=k<=8} |nu(f_k) - sum_g w_g nu(f_k o tau_g)| with f_k = e^{2ik theta},
/// for the Bernoulli step distribution of cfg.
double stationarity_residual(const EmpiricalMeasure& m, const DisorderConfig& cfg);
/// Same with an arbitrary discrete measure on SL2(R).
double stationarity_residual(const EmpiricalMeasure& m, const DiscreteSl2Measure& mu);

inline constexpr int kStationarityModes = 8;
/// The contract residual <= kStationarityTolerance / sqrt(M).
inline constexpr double kStationarityTolerance = 5.0;

/// For each r, the largest fraction of samples in a closed arc of length r
/// (wrap-around included). Exactly nondecreasing in r.
IntervalMassProfile max_interval_mass(const EmpiricalMeasure& m, std::span<const double> radii);

struct DimensionOptions {
  double scale_low = 0;  // 0: smallest power of two >= 2 pi / M
  double scale_high = 0x1.0p-4;
  int bootstrap = 200;
  std::uint64_t seed = 0;
};

/// Slope of log C(r) against log r over dyadic r, where C(r) counts pairs at
/// circular distance < r. The 90% interval comes from resampling the
/// samples with replacement. Throws Error("measure degenerate at these
/// scales") if some C(r) vanishes.
DimensionEstimate correlation_dimension(const EmpiricalMeasure& m, DimensionOptions opts = {});

struct RenormOptions {
  std::size_t max_atoms = 1'000'000;
  /// 0 = none. Atoms of this word length stop regardless of norm (a bounded
  /// stopping time), and their weight is reported as unresolved.
  int max_depth = 0;
};

/// Stopping-time refinement of the step distribution: every atom g with
/// |g| < T is replaced by g g+ and g g- at half weight. Throws
/// Error("renormalization did not terminate at this T") past max_atoms.
DiscreteSl2Measure renormalize_support(const DisorderConfig& cfg, double threshold,
                                       RenormOptions opts = {});

/// One draw from the stopped distribution: multiply steps from the right
/// until the norm reaches T (or max_length steps). Returns the product and
/// the number of steps.
std::pair<Sl2, int> sample_stopped_word(const DisorderConfig& cfg, double threshold,
                                        CounterRng& rng, int max_length = 1 << 20);

/// Residual of the stopped-distribution stationarity, estimated by drawing
/// `draws` independent stopped words per sample.
double stopped_stationarity_residual(const EmpiricalMeasure& m, const DisorderConfig& cfg,
                                     double threshold, std::uint64_t seed, int draws = 16);

/// Arc [start, start + length) on R/(pi Z); length >= pi is everything.
struct Arc {
  double start = 0;
  double length = 0;
  bool contains(double angle) const;
};

struct ArcMassResult {
  double expanding = 0;   // P(v+ in I+)
  double contracting = 0; // P(v- in I-)
  double joint = 0;       // P(both)
  std::uint64_t hyperbolic = 0;
  std::uint64_t non_hyperbolic = 0;
};

/// Eigendirections (expanding, contracting) of M_N for R streams; non
/// hyperbolic realizations are left out and counted.
struct EigenDirections {
  std::vector<double> expanding;
  std::vector<double> contracting;
  std::uint64_t non_hyperbolic = 0;
};
EigenDirections eigen_directions(const DisorderConfig& cfg, std::uint64_t n_steps,
                                 std::uint64_t realizations, std::uint64_t seed);

/// Probabilities over hyperbolic realizations.
ArcMassResult direction_arc_mass(const DisorderConfig& cfg, std::uint64_t n_steps, Arc plus,
                                 Arc minus, std::uint64_t realizations, std::uint64_t seed);

struct ArcSweep {
  std::vector<double> etas;
  std::vector<double> max_mass;  // max over arc centers of P(v- in arc of length eta)
  double exponent = 0;           // fitted c in max_mass ~ eta^c
  double residual = 0;
  std::uint64_t non_hyperbolic = 0;
};
ArcSweep arc_exponent_sweep(const DisorderConfig& cfg, std::uint64_t n_steps,
                            std::uint64_t realizations, std::uint64_t seed,
                            std::span<const double> etas);

struct MultiscaleOptions {
  double near_exponent = 0.1;  // inner radius lambda^a |I|
  double d_low_exponent = 0.1; // D from lambda^-a ...
  double d_high_exponent = 0.2; // ... to lambda^-b
};

struct MultiscaleReport {
  double mass = 0;       // nu(I)
  double near_term = 0;  // max_{|J| < lambda^a |I|} nu(J)
  double far_term = 0;   // max_D (1/D) max_{|J| < D|I|} nu(J)
  double best_d = 0;
  double ratio = 0;      // mass / (near_term + far_term), 0 if mass is 0
};

/// Compares nu(I) with the two-scale right-hand side, without any
/// prefactor. Requires |I| <= lambda.
MultiscaleReport multiscale_diagnostic(const EmpiricalMeasure& m, double disorder, Arc interval,
                                       MultiscaleOptions opts = {});

}  // namespace ablab
