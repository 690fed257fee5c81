// SPDX-License-Identifier: Apache-2.0
#include "ablab/pastur.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ablab/error.hpp"
#include "ablab/parallel.hpp"
#include "ablab/stats.hpp"

namespace ablab {

using cplx = std::complex<double>;

PhaseState PhaseState::from_zeta(cplx zeta) {
  return {zeta, Direction::reduce(0.5 * std::arg(zeta))};
}

PasturParams kappa_of(double energy) {
  if (!(std::abs(energy) < 2)) throw Error("outside band");
  PasturParams p;
  p.kappa = std::acos(0.5 * energy);
  p.mu = std::polar(1.0, 2.0 * p.kappa);
  return p;
}

cplx zeta_step_raw(const PasturParams& p, cplx zeta, double lambda, int sign) {
  const double v = -sign / std::sin(p.kappa);
  const cplx a{0.0, 0.5 * lambda * v};
  const cplx rotated = p.mu * zeta;
  const cplx denom = 1.0 - a * (rotated - 1.0);
  if (std::abs(denom) < 1e-12) throw Error("Pastur recursion singular");
  return rotated + a * (rotated - 1.0) * (rotated - 1.0) / denom;
}

PhaseState zeta_step(const PasturParams& p, const PhaseState& s, double lambda, int sign) {
  const cplx next = zeta_step_raw(p, s.zeta, lambda, sign);
  return PhaseState::from_zeta(next / std::abs(next));
}

std::array<double, 2> matched_initial_vector() { return {1.0, 0.0}; }

double fp_lognorm(const DisorderConfig& cfg, const BernoulliWord& word) {
  if (word.signs.empty()) throw Error("fp_lognorm: empty word");
  const PasturParams p = kappa_of(cfg.energy());
  const double lambda = cfg.disorder();
  if (lambda == 0.0) return 0.0;
  const double inv_sin = 1.0 / std::sin(p.kappa);

  cplx zeta{1.0, 0.0};
  double log_sum = 0.0;
  double product = 1.0;
  int pending = 0;
  for (const auto s : word.signs) {
    // mu*zeta = e^{2i(phi + kappa)}: sin 2(phi+kappa) is its imaginary part and
    // sin^2(phi+kappa) = (1 - Re)/2.
    const cplx rotated = p.mu * zeta;
    const double sin2 = rotated.imag();
    const double sin_sq = 0.5 * (1.0 - rotated.real());
    const double lv = lambda * (-s * inv_sin);
    product *= 1.0 + lv * sin2 + lv * lv * sin_sq;
    // Factors lie in [(1 - lambda|V|)^2, (1 + lambda|V|)^2]; flush before the
    // running product can leave the normal range.
    if (++pending == 32) {
      log_sum += std::log(product);
      product = 1.0;
      pending = 0;
    }
    const cplx next = zeta_step_raw(p, zeta, lambda, s);
    zeta = next / std::abs(next);
  }
  log_sum += std::log(product);
  return log_sum / (2.0 * static_cast<double>(word.size()));
}

double analytic_lyapunov(const DisorderConfig& cfg) {
  const double e = cfg.energy(), l = cfg.disorder();
  return l * l / (2.0 * (4.0 - e * e));
}

std::vector<double> lyapunov_samples(const DisorderConfig& cfg, std::uint64_t n_steps,
                                     std::uint64_t realizations, std::uint64_t seed) {
  return map_realizations(realizations, [&](std::size_t r) {
    return log_norm_streamed(cfg, n_steps, seed, r) / static_cast<double>(n_steps);
  });
}

LyapunovEstimate mc_lyapunov(const DisorderConfig& cfg, std::uint64_t n_steps,
                             std::uint64_t realizations, std::uint64_t seed) {
  if (n_steps < 1000) throw Error("mc_lyapunov: N must be >= 1000");
  if (realizations < 2) throw Error("mc_lyapunov: need at least 2 realizations");
  const auto samples = lyapunov_samples(cfg, n_steps, realizations, seed);
  const auto ms = mean_stderr(samples);
  return {ms.mean, ms.std_error, n_steps, realizations};
}

double tail_fraction(const std::vector<double>& samples, double lyapunov, double a) {
  if (samples.empty()) throw Error("tail_fraction: empty sample");
  const double threshold = a * lyapunov;
  const auto hits = std::count_if(samples.begin(), samples.end(), [&](double x) {
    return std::abs(x - lyapunov) > threshold;
  });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

std::vector<DeviationTail> deviation_tails(const DisorderConfig& cfg, std::uint64_t n_steps,
                                           const std::vector<double>& a_values,
                                           std::uint64_t realizations, std::uint64_t seed) {
  if (realizations < 1000) throw Error("deviation_tail: R must be >= 1000");
  for (double a : a_values) {
    if (!(a >= 0)) throw Error("deviation_tail: a must be >= 0");
  }
  const double lyap = analytic_lyapunov(cfg);
  const auto samples = lyapunov_samples(cfg, n_steps, realizations, seed);
  std::vector<DeviationTail> out;
  out.reserve(a_values.size());
  for (double a : a_values) {
    // a = 0 counts every realization: the event is |x - L| >= 0.
    const double p = a == 0.0 ? 1.0 : tail_fraction(samples, lyap, a);
    out.push_back({a, p, std::exp(-0.5 * a * a * lyap * static_cast<double>(n_steps))});
  }
  return out;
}

DeviationTail deviation_tail(const DisorderConfig& cfg, std::uint64_t n_steps, double a,
                             std::uint64_t realizations, std::uint64_t seed) {
  return deviation_tails(cfg, n_steps, {a}, realizations, seed).front();
}

}  // namespace ablab
