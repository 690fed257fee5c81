// SPDX-License-Identifier: Apache-2.0
#include "ablab/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ablab/error.hpp"
#include "ablab/parallel.hpp"
#include "ablab/rng.hpp"
#include "ablab/stats.hpp"

namespace ablab {

using Complex = std::complex<double>;

std::vector<std::int8_t> green_box_signs(std::uint64_t n_prime, std::uint64_t seed,
                                         std::uint64_t stream) {
  SignStream s(seed, stream);
  std::vector<std::int8_t> signs(2 * n_prime + 1);
  for (auto& e : signs) e = static_cast<std::int8_t>(s.next());
  return signs;
}

double complex_op_norm(const std::array<Complex, 4>& m) {
  const double f2 = std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) + std::norm(m[3]);
  const double det = std::abs(m[0] * m[3] - m[1] * m[2]);
  const double disc = std::max(0.0, (f2 - 2 * det) * (f2 + 2 * det));
  return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
}

void ComplexScaledProduct::push(Complex diag) {
  const Complex na = diag * m_[0] - m_[2];
  const Complex nb = diag * m_[1] - m_[3];
  m_[2] = m_[0];
  m_[3] = m_[1];
  m_[0] = na;
  m_[1] = nb;
  constexpr double kLimit = 0x1.0p64;
  if (std::abs(na.real()) > kLimit || std::abs(na.imag()) > kLimit ||
      std::abs(nb.real()) > kLimit || std::abs(nb.imag()) > kLimit) {
    rescale();
  }
}

void ComplexScaledProduct::rescale() {
  double big = 0;
  for (const auto& x : m_) big = std::max({big, std::abs(x.real()), std::abs(x.imag())});
  int e = 0;
  std::frexp(big, &e);
  for (auto& x : m_) x = {std::ldexp(x.real(), -e), std::ldexp(x.imag(), -e)};
  log_scale_ += e * std::numbers::ln2;
}

double ComplexScaledProduct::unscaled_norm() const { return complex_op_norm(m_); }

double transfer_ratio(const DisorderConfig& cfg, Complex z, std::span<const std::int8_t> signs) {
  if (signs.size() % 2 == 0 || signs.size() < 3) throw Error("transfer_ratio: need 2N'+1 sites");
  const std::size_t origin = signs.size() / 2;
  const double lambda = cfg.disorder();
  ComplexScaledProduct a, b;
  for (std::size_t k = 0; k <= origin; ++k) a.push(z - lambda * signs[k]);
  for (std::size_t k = origin + 1; k < signs.size(); ++k) b.push(z - lambda * signs[k]);
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  const std::array<Complex, 4> ba{mb[0] * ma[0] + mb[1] * ma[2], mb[0] * ma[1] + mb[1] * ma[3],
                                  mb[2] * ma[0] + mb[3] * ma[2], mb[2] * ma[1] + mb[3] * ma[3]};
  return std::exp(std::log(a.unscaled_norm()) + std::log(b.unscaled_norm()) -
                  std::log(complex_op_norm(ba)));
}

double box_green(const DisorderConfig& cfg, Complex z, std::span<const std::int8_t> signs) {
  if (signs.size() % 2 == 0) throw Error("box_green: need 2N'+1 sites");
  const std::size_t origin = signs.size() / 2;
  const double lambda = cfg.disorder();
  // Self-energy of the chain on one side, eliminated from its far end.
  Complex left = 0.0;
  for (std::size_t k = 0; k < origin; ++k) left = 1.0 / (lambda * signs[k] - z - left);
  Complex right = 0.0;
  for (std::size_t k = signs.size() - 1; k > origin; --k) {
    right = 1.0 / (lambda * signs[k] - z - right);
  }
  return std::abs(1.0 / (lambda * signs[origin] - z - left - right));
}

GreenSample green_abs(const DisorderConfig& cfg, Complex z, std::uint64_t n_prime,
                      std::uint64_t seed, std::uint64_t stream, GreenMethod method) {
  if (!(z.imag() > 0)) throw Error("green_abs: need y > 0");
  if (n_prime < 1000) throw Error("green_abs: need N' >= 1000");
  const auto signs = green_box_signs(n_prime, seed, stream);
  GreenSample s;
  s.z = z;
  s.method = method;
  s.magnitude = method == GreenMethod::kTransferRatio ? transfer_ratio(cfg, z, signs)
                                                      : box_green(cfg, z, signs);
  return s;
}

double moment_imaginary_part(double truncation) {
  return std::min(kGreenY, 1.0 / (10.0 * truncation));
}

std::vector<double> green_samples(const DisorderConfig& cfg, double y, std::uint64_t n_prime,
                                  std::uint64_t realizations, std::uint64_t seed,
                                  GreenMethod method) {
  const Complex z{cfg.energy(), y};
  return map_realizations(realizations, [&](std::size_t r) {
    return green_abs(cfg, z, n_prime, seed, r, method).magnitude;
  });
}

namespace {

double mean_of(std::vector<double> v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double truncated_mean(const std::vector<double>& g, double k) {
  std::vector<double> t(g.size());
  std::transform(g.begin(), g.end(), t.begin(), [k](double x) { return std::min(x, k); });
  return mean_of(std::move(t));
}

double power_mean(const std::vector<double>& g, double gamma, double cap) {
  std::vector<double> t(g.size());
  std::transform(g.begin(), g.end(), t.begin(),
                 [&](double x) { return std::pow(std::min(x, cap), gamma); });
  return mean_of(std::move(t));
}

}  // namespace

double truncated_green_moment(const DisorderConfig& cfg, double truncation,
                              std::uint64_t n_prime, std::uint64_t realizations,
                              std::uint64_t seed, GreenMethod method) {
  if (!(truncation > 0)) throw Error("truncated_green_moment: K must be positive");
  if (realizations == 0) throw Error("truncated_green_moment: need R >= 1");
  const auto g =
      green_samples(cfg, moment_imaginary_part(truncation), n_prime, realizations, seed, method);
  return truncated_mean(g, truncation);
}

TruncationCurve truncated_moment_curve(const DisorderConfig& cfg,
                                       std::span<const double> truncations,
                                       std::uint64_t n_prime, std::uint64_t realizations,
                                       std::uint64_t seed, GreenMethod method) {
  if (truncations.size() < 2) throw Error("truncated_moment_curve: need at least two K values");
  if (realizations == 0) throw Error("truncated_moment_curve: need R >= 1");
  const double kmax = *std::max_element(truncations.begin(), truncations.end());
  const auto g = green_samples(cfg, moment_imaginary_part(kmax), n_prime, realizations, seed, method);
  TruncationCurve curve;
  std::vector<double> lx, ly;
  for (double k : truncations) {
    curve.truncations.push_back(k);
    curve.means.push_back(truncated_mean(g, k));
    lx.push_back(std::log(k));
    ly.push_back(std::log(curve.means.back()));
  }
  const auto fit = linear_fit(lx, ly);
  curve.slope = fit.slope;
  curve.residual = fit.residual;
  return curve;
}

FractionalMoment fractional_moment(const DisorderConfig& cfg, double gamma,
                                   std::uint64_t n_prime, std::uint64_t realizations,
                                   std::uint64_t seed, GreenMethod method) {
  if (!(gamma > 0 && gamma < 1)) throw Error("fractional_moment: need 0 < gamma < 1");
  if (realizations == 0) throw Error("fractional_moment: need R >= 1");
  const auto g = green_samples(cfg, kGreenY, n_prime, realizations, seed, method);
  const auto g_half = green_samples(cfg, kGreenY / 2, n_prime, realizations, seed, method);
  FractionalMoment fm;
  fm.value = power_mean(g, gamma, INFINITY);
  fm.truncated_value = power_mean(g, gamma, kGreenTruncation);
  fm.half_y_value = power_mean(g_half, gamma, INFINITY);
  fm.truncation_stable = std::abs(fm.truncated_value - fm.value) < 0.1 * fm.value;
  fm.limit_stable = std::abs(fm.half_y_value - fm.value) < 0.05 * fm.value;
  return fm;
}

}  // namespace ablab
