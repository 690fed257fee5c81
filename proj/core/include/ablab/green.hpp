// SPDX-License-Identifier: Apache-2.0
//
// Diagonal Green's function G(0,0,z) of H = Delta + lambda V on the box
// [-N', N'], by exact elimination or by the transfer-matrix norm ratio, and
// its truncated and fractional moments over the disorder.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ablab/cocycle.hpp"

namespace ablab {

enum class GreenMethod { kTransferRatio, kBoxInversion };

struct GreenSample {
  std::complex<double> z;
  double magnitude = 0;
  GreenMethod method = GreenMethod::kTransferRatio;
};

/// Potential eps_{-N'}..eps_{N'} of realization `stream`, site -N' first.
std::vector<std::int8_t> green_box_signs(std::uint64_t n_prime, std::uint64_t seed,
                                         std::uint64_t stream);

/// Running complex product of transfer matrices (z - lambda eps, -1; 1, 0),
/// held as e^log_scale * m with power-of-two rescaling.
class ComplexScaledProduct {
 public:
  using Complex = std::complex<double>;
  void push(Complex diag);
  /// Largest singular value of the stored matrix (without the scale).
  double unscaled_norm() const;
  double log_norm() const { return log_scale_ + std::log(unscaled_norm()); }
  double log_scale() const { return log_scale_; }
  const std::array<Complex, 4>& matrix() const { return m_; }

 private:
  void rescale();
  std::array<Complex, 4> m_{Complex(1), Complex(0), Complex(0), Complex(1)};
  double log_scale_ = 0.0;
};

/// Largest singular value of a complex 2x2 matrix (a, b; c, d).
double complex_op_norm(const std::array<std::complex<double>, 4>& m);

/// |A| |B| / |BA| with A the product over sites -N'..0 and B over 1..N'.
double transfer_ratio(const DisorderConfig& cfg, std::complex<double> z,
                      std::span<const std::int8_t> signs);

/// |G(0,0,z)| of the box by Schur elimination from both ends.
double box_green(const DisorderConfig& cfg, std::complex<double> z,
                 std::span<const std::int8_t> signs);

/// Requires y > 0 and N' >= 1000.
GreenSample green_abs(const DisorderConfig& cfg, std::complex<double> z, std::uint64_t n_prime,
                      std::uint64_t seed, std::uint64_t stream = 0,
                      GreenMethod method = GreenMethod::kTransferRatio);

/// y used by the moment estimators for truncation level K: min(1e-6, 1/(10K)).
double moment_imaginary_part(double truncation);

/// |G| over R realizations at z = E + i y, in stream order.
std::vector<double> green_samples(const DisorderConfig& cfg, double y, std::uint64_t n_prime,
                                  std::uint64_t realizations, std::uint64_t seed,
                                  GreenMethod method);

/// Mean of min(|G|, K), K > 1.
double truncated_green_moment(const DisorderConfig& cfg, double truncation,
                              std::uint64_t n_prime, std::uint64_t realizations,
                              std::uint64_t seed, GreenMethod method = GreenMethod::kBoxInversion);

struct TruncationCurve {
  std::vector<double> truncations;
  std::vector<double> means;
  double slope = 0;  // of log mean against log K
  double residual = 0;
};
/// Truncated means on a K-grid from one sample set (so nondecreasing in K).
TruncationCurve truncated_moment_curve(const DisorderConfig& cfg,
                                       std::span<const double> truncations,
                                       std::uint64_t n_prime, std::uint64_t realizations,
                                       std::uint64_t seed,
                                       GreenMethod method = GreenMethod::kBoxInversion);

struct FractionalMoment {
  double value = 0;            // mean |G|^gamma at y = 1e-6
  double truncated_value = 0;  // same with |G| capped at 1e6
  double half_y_value = 0;     // same at y / 2
  bool truncation_stable = false;  // relative change < 10%
  bool limit_stable = false;       // y and y/2 within 5%
};
/// Requires 0 < gamma < 1.
FractionalMoment fractional_moment(const DisorderConfig& cfg, double gamma,
                                   std::uint64_t n_prime, std::uint64_t realizations,
                                   std::uint64_t seed,
                                   GreenMethod method = GreenMethod::kBoxInversion);

inline constexpr double kGreenY = 1e-6;
inline constexpr double kGreenTruncation = 1e6;

}  // namespace ablab
