// SPDX-License-Identifier: Apache-2.0
#include "ablab/sl2.hpp"

#include <algorithm>
#include <limits>

#include "ablab/error.hpp"

namespace ablab {

double op_norm(const Mat2& m) {
  return 0.5 * (std::hypot(m.a + m.d, m.b - m.c) + std::hypot(m.a - m.d, m.b + m.c));
}

Sl2::Sl2(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d))) {
    throw Error("Sl2: non-finite entry");
  }
  if (!(det > 0)) throw Error("Sl2: determinant must be positive to renormalize");
  // Exact products such as I g keep their entries; rounding-level drift is left alone.
  if (std::abs(det - 1) <= 4 * std::numeric_limits<double>::epsilon()) {
    m_ = {a, b, c, d};
    return;
  }
  const double s = 1.0 / std::sqrt(det);
  m_ = {a * s, b * s, c * s, d * s};
}

Sl2 Sl2::rotation(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return Sl2(c, -s, s, c);
}

Sl2 Sl2::diag(double s) { return Sl2(s, 0.0, 0.0, 1.0 / s); }

double Direction::reduce(double angle) {
  double r = std::fmod(angle, std::numbers::pi);
  if (r < 0) r += std::numbers::pi;
  // fmod of a tiny negative value can round up to pi itself.
  if (r >= std::numbers::pi) r = 0.0;
  return r;
}

double circular_distance(double x, double y) {
  const double d = std::abs(Direction::reduce(x - y));
  return std::min(d, std::numbers::pi - d);
}

Sl2 compose(const Sl2& g, const Sl2& h) {
  const Mat2 p = g.mat() * h.mat();
  if (!(p.max_abs() <= 1e300)) throw Error("norm overflow; use propagate with log-scaling");
  return Sl2(p);
}

Direction act(const Mat2& g, Direction theta) {
  const auto [x, y] = theta.unit();
  const auto [u, v] = g.apply(x, y);
  return Direction::of_vector(u, v);
}

double derivative(const Sl2& g, Direction theta) {
  const auto [x, y] = theta.unit();
  const auto [u, v] = g.mat().apply(x, y);
  return 1.0 / (u * u + v * v);
}

double cos_separation(const Sl2& g, Direction theta) {
  return std::abs(std::cos(theta.angle())) + std::abs(std::cos(act(g, theta).angle()));
}

namespace {

// Eigenvector of m for eigenvalue mu: pick whichever of the two null-space
// candidates of (m - mu) is better conditioned.
Direction eigen_direction(const Mat2& m, double mu) {
  const double x1 = m.b, y1 = mu - m.a;
  const double x2 = mu - m.d, y2 = m.c;
  if (std::hypot(x1, y1) >= std::hypot(x2, y2)) return Direction::of_vector(x1, y1);
  return Direction::of_vector(x2, y2);
}

}  // namespace

EigenSplit eigen_split_scaled(const Mat2& m, double log_scale) {
  const double tr = m.trace();
  constexpr double kHyperbolic = 2.0 + 1e-12;
  if (tr == 0.0 || std::log(std::abs(tr)) + log_scale <= std::log(kHyperbolic)) {
    throw Error("not hyperbolic");
  }
  // Eigenvalues of m are mu with mu^2 - tr mu + det(m) = 0, det(m) = e^{-2 log_scale}.
  const double det = m.det();
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  const double mu_top = 0.5 * (tr + std::copysign(disc, tr));
  const double mu_low = det / mu_top;

  EigenSplit out;
  out.expanding = eigen_direction(m, mu_top);
  out.contracting = eigen_direction(m, mu_low);
  out.log_abs_top = std::log(std::abs(mu_top)) + log_scale;
  out.top_eigenvalue = std::copysign(std::exp(out.log_abs_top), mu_top);
  out.wedge = std::abs(std::sin(out.expanding.angle() - out.contracting.angle()));
  return out;
}

EigenSplit eigen_split(const Sl2& m) { return eigen_split_scaled(m.mat(), 0.0); }

Mat2 reconstruct(const EigenSplit& s) {
  const auto [px, py] = s.expanding.unit();
  const auto [mx, my] = s.contracting.unit();
  // Projector onto v+ along v-: v+ (v-^perp)^T / <v-^perp, v+>, perp = (-y, x).
  const double cross = px * my - py * mx;  // det[v+, v-]; <v-^perp, v+> = -cross
  const double lp = s.top_eigenvalue, lm = 1.0 / s.top_eigenvalue;
  const Mat2 p_plus{px * my / cross, -px * mx / cross, py * my / cross, -py * mx / cross};
  // Projector onto v- along v+: v- (v+^perp)^T / <v+^perp, v->, the latter = cross.
  const Mat2 p_minus{-mx * py / cross, mx * px / cross, -my * py / cross, my * px / cross};
  return {lp * p_plus.a + lm * p_minus.a, lp * p_plus.b + lm * p_minus.b,
          lp * p_plus.c + lm * p_minus.c, lp * p_plus.d + lm * p_minus.d};
}

}  // namespace ablab
