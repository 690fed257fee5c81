// SPDX-License-Identifier: Apache-2.0
//
// Bernoulli transfer-matrix cocycle: disorder words, rescaled products and
// projective orbits.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ablab/sl2.hpp"

namespace ablab {

/// Model parameters: energy E, coupling lambda >= 0 and the band margin
/// delta0. The energy must satisfy delta0 < |E| < 2 - delta0.
class DisorderConfig {
 public:
  DisorderConfig(double energy, double disorder, double delta0 = 0.1);

  double energy() const { return energy_; }
  double disorder() const { return disorder_; }
  double delta0() const { return delta0_; }

  /// E - lambda*eps for eps = +1 / -1.
  double diagonal(int sign) const { return energy_ - disorder_ * sign; }

 private:
  double energy_;
  double disorder_;
  double delta0_;
};

/// Finite sign sequence eps_1..eps_N together with the stream it came from.
struct BernoulliWord {
  std::vector<std::int8_t> signs;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t size() const { return signs.size(); }

  /// Concatenation w1 || w2 (the seed trace of the first word is kept).
  BernoulliWord concat(const BernoulliWord& tail) const;
};

/// (E - lambda*eps, -1; 1, 0), determinant exactly one.
Sl2 step_matrix(const DisorderConfig& cfg, int sign);

/// Deterministic in (seed, stream): sign k is bit k of the stream's
/// counter-based bit sequence.
BernoulliWord sample_word(std::size_t n, std::uint64_t seed, std::uint64_t stream);

/// Running product g_N ... g_1 held as e^log_scale * m. Entries of m are
/// kept below 2^64 by dividing through by an exact power of two.
class ScaledProduct {
 public:
  static constexpr double kRescaleAbove = 0x1.0p64;

  /// Left-multiplies by (diag -1; 1 0).
  void push(double diag) {
    const double na = diag * m_.a - m_.c;
    const double nb = diag * m_.b - m_.d;
    m_.c = m_.a;
    m_.d = m_.b;
    m_.a = na;
    m_.b = nb;
    // The bottom row is the previous top row, so checking the top suffices.
    if (std::abs(na) > kRescaleAbove || std::abs(nb) > kRescaleAbove) rescale();
  }

  const Mat2& matrix() const { return m_; }
  double log_scale() const { return log_scale_; }
  double log_norm() const { return log_scale_ + std::log(op_norm(m_)); }

 private:
  void rescale();

  Mat2 m_{};
  double log_scale_ = 0.0;
};

struct CocycleTrace {
  double log_norm = 0;           // log |M_N|
  Mat2 normalized_matrix{};      // M_N / |M_N|, so M_N = e^log_norm * normalized
  std::vector<Direction> orbit;  // act(M_j, theta0), j = 0..N (empty if not stored)
  double log_vector_growth = 0;  // log |M_N u0|

  /// M_N itself; throws Error once |M_N|^2 is beyond double precision.
  Sl2 matrix() const;
};

struct PropagateOptions {
  /// Default: store the orbit only for N <= 1e6.
  std::optional<bool> store_orbit;
};

CocycleTrace propagate(const DisorderConfig& cfg, const BernoulliWord& word, Direction theta0,
                       std::array<double, 2> u0, PropagateOptions opts = {});

/// log(|M_N| / |M_N u|) >= 0, evaluated from the normalized product.
double growth_ratio(const DisorderConfig& cfg, const BernoulliWord& word,
                    std::array<double, 2> u);

/// log |M_N| for the word of (seed, stream), generated on the fly. Bit
/// identical to propagate(cfg, sample_word(n, seed, stream), ...).log_norm.
double log_norm_streamed(const DisorderConfig& cfg, std::uint64_t n, std::uint64_t seed,
                         std::uint64_t stream);

/// The product M_N of the streamed word, in rescaled form.
ScaledProduct product_streamed(const DisorderConfig& cfg, std::uint64_t n, std::uint64_t seed,
                               std::uint64_t stream);

}  // namespace ablab
