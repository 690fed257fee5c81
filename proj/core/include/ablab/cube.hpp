// SPDX-License-Identifier: Apache-2.0
//
// Anticoncentration on the Boolean cube {1,-1}^n: influences, exhaustive
// level-set masses, and the Sperner-type bounds for monotone functions.
//
// Sign vectors are bitmasks: bit j set <=> eps_{j+1} = +1 (variables are
// 0-based in code).
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ablab/cocycle.hpp"

namespace ablab {

/// Real function on {1,-1}^n: a 2^n table (n <= 24) or, for Monte Carlo
/// use, an evaluation callback.
class CubeFunction {
 public:
  using Evaluator = std::function<double(std::uint64_t mask)>;
  static constexpr int kMaxTableDim = 24;

  /// Table mode; values.size() must equal 2^n.
  CubeFunction(int n, std::vector<double> values);
  /// Tabulates eval on every mask (n <= 24).
  static CubeFunction tabulate(int n, const Evaluator& eval);
  /// Callback mode for n beyond the table limit.
  static CubeFunction callback(int n, Evaluator eval);

  int dim() const { return n_; }
  bool is_table() const { return !eval_; }
  const std::vector<double>& values() const;
  double operator()(std::uint64_t mask) const;

  CubeFunction operator+(const CubeFunction& other) const;

 private:
  CubeFunction(int n, Evaluator eval) : n_(n), eval_(std::move(eval)) {}

  int n_;
  std::vector<double> values_;
  Evaluator eval_;
};

/// I_j = f|_{eps_j = 1} - f|_{eps_j = -1}, a function of the other n-1
/// variables (remaining bits keep their relative order).
CubeFunction influence(const CubeFunction& f, int j);

/// Predicate on sign vectors that may only read the bits in `window`.
struct CubeEvent {
  std::function<bool(std::uint64_t)> contains;
  std::uint64_t window = 0;

  static CubeEvent everything(std::uint64_t window) {
    return {[](std::uint64_t) { return true; }, window};
  }
};

/// Omega_j (reads eps_1..eps_{j-1}) and Omega'_j (reads eps_{j+1}..eps_n).
/// For the pair form only `omega` is used, reading eps_{j+2}..eps_n.
struct EventFamily {
  std::vector<CubeEvent> omega;
  std::vector<CubeEvent> omega_prime;

  static std::uint64_t prefix_window(int j) { return (std::uint64_t{1} << j) - 1; }
  static std::uint64_t suffix_window(int n, int first) {
    if (first >= n) return 0;
    return ((std::uint64_t{1} << n) - 1) & ~((std::uint64_t{1} << first) - 1);
  }

  /// Omega_j = Omega'_j = whole cube.
  static EventFamily full(int n);
  /// Omega_j = whole cube with the pair-form window eps_{j+2}..eps_n.
  static EventFamily full_pairs(int n);

  /// Throws Error("window violation ...") if some predicate changes when a
  /// variable outside its declared window is flipped.
  void validate(int n) const;
};

enum class MassMode { kExhaustive, kMonteCarlo };

struct LevelMassReport {
  double kappa = 0;
  double worst_t = 0;
  double worst_mass = 0;  // max over the t-grid of mes[|f - t| < kappa]
  double bound = 0;
  int n = 0;
  MassMode mode = MassMode::kExhaustive;
  std::uint64_t worst_count = 0;  // exact numerator of worst_mass
  std::uint64_t population = 0;   // 2^n, or the number of Monte Carlo samples
  double ratio = 0;               // worst_mass / bound
  bool holds = false;             // worst_mass <= bound (or the pair-form verdict)
};

/// Grid t0, t0 + pitch, ... covering [lo - kappa, hi + kappa] at pitch kappa/4.
std::vector<double> default_t_grid(double lo, double hi, double kappa);

/// Exact max over t of #{x : |x - t| < kappa} on the real line, for a
/// sorted sample. Returns (best t, best count).
std::pair<double, std::uint64_t> worst_window(const std::vector<double>& sorted, double kappa,
                                              const std::vector<double>& t_grid);

/// min over j and sign vectors of I_j (the largest admissible kappa).
double influence_floor(const CubeFunction& f);

/// Member `index` of a reproducible corpus of monotone functions on n
/// variables: sum_j w_j eps_j with w_j uniform in [0.5, 1.5], plus up to
/// three terms c * [eps_i = 1 for all i in S], |S| in {2, 3}, c in [0, 1].
CubeFunction random_monotone(int n, std::uint64_t seed, std::uint64_t index);

/// f = eps_1 + ... + eps_n.
CubeFunction linear_sum(int n);

/// Witness text if some influence is negative.
std::optional<std::string> monotonicity_witness(const CubeFunction& f);

/// Checks monotonicity and I_j >= kappa on Omega_j cap Omega'_j, then reports
/// the worst level mass against 1/sqrt(n) + sum_j (2 - mes Omega_j - mes Omega'_j).
/// Errors: "not monotone", "influence hypothesis fails", "window violation".
LevelMassReport lemma1_check(const CubeFunction& f, double kappa, const EventFamily& events,
                             const std::vector<double>& t_grid = {});

/// Single-influence bound alone (for a validated family).
double lemma1_bound(int n, const EventFamily& events);

/// Pair form: monotone f, f|_{eps_j = eps_{j+1} = 1} - f|_{= -1} >= kappa on
/// Omega_j, mes Omega_j >= 1 - delta. The reference scale is
/// 1/sqrt(n) + n delta; `ratio` is the worst mass over it.
LevelMassReport lemma2_check(const CubeFunction& f, double kappa, double delta,
                             const EventFamily& events, const std::vector<double>& t_grid = {});

/// Calibration constant of the pair form: ratios above it are warnings,
/// ratios above kLemma2Fail are failures.
inline constexpr double kLemma2Calibration = 4.0;
inline constexpr double kLemma2Fail = 10.0;

/// Harness constant C in mes[|tau - t| < kappa_w] <= C lambda.
inline constexpr double kTauMassConstant = 8.0;

struct TauMassOptions {
  MassMode mode = MassMode::kExhaustive;
  std::uint64_t realizations = 0;  // Monte Carlo only
  std::uint64_t seed = 0;          // Monte Carlo only
};

/// Distribution of tau_{M_N(eps)}(theta0) over all 2^N words (N <= 20) or R
/// sampled words, scanned with circular windows of half-width kappa_w at
/// pitch kappa_w / 4. The bound reported is kTauMassConstant * lambda.
LevelMassReport tau_level_mass(const DisorderConfig& cfg, int n_steps, Direction theta0,
                               double window, TauMassOptions opts = {});

/// All 2^N final angles in word order (bit k of the index is eps_{k+1}).
std::vector<double> tau_values_exhaustive(const DisorderConfig& cfg, int n_steps,
                                          Direction theta0);

/// Max over a circular t-grid of #{x : dist(x, t) < window} on R/(pi Z).
std::pair<double, std::uint64_t> worst_circular_window(const std::vector<double>& sorted,
                                                       double window);

}  // namespace ablab
