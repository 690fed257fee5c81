// SPDX-License-Identifier: Apache-2.0
//
// SL2(R) algebra and the projective action on the line of directions,
// parametrized by the angle modulo pi.
#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace ablab {

/// Plain real 2x2 matrix (a b; c d). Used for rescaled running products
/// whose determinant is not one.
struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }
  constexpr std::array<double, 2> apply(double x, double y) const {
    return {a * x + b * y, c * x + d * y};
  }
  constexpr Mat2 scaled(double s) const { return {a * s, b * s, c * s, d * s}; }

  friend constexpr Mat2 operator*(const Mat2& g, const Mat2& h) {
    return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c,
            g.c * h.b + g.d * h.d};
  }
};

/// Largest singular value, closed form: (|z1| + |z2|)/2 with
/// z1 = (a+d, b-c), z2 = (a-d, b+c).
double op_norm(const Mat2& m);

/// Unit-determinant real matrix. Construction divides by sqrt(det), so the
/// invariant |det - 1| <= 1e-9 holds for every value of this type.
class Sl2 {
 public:
  Sl2() = default;
  /// Throws Error if det <= 0 or an entry is not finite.
  Sl2(double a, double b, double c, double d);
  explicit Sl2(const Mat2& m) : Sl2(m.a, m.b, m.c, m.d) {}

  static Sl2 identity() { return {}; }
  static Sl2 rotation(double phi);
  static Sl2 diag(double s);

  double a() const { return m_.a; }
  double b() const { return m_.b; }
  double c() const { return m_.c; }
  double d() const { return m_.d; }
  const Mat2& mat() const { return m_; }
  double det() const { return m_.det(); }
  double trace() const { return m_.trace(); }
  double norm() const { return op_norm(m_); }
  Sl2 inverse() const { return Sl2(m_.d, -m_.b, -m_.c, m_.a); }

 private:
  Mat2 m_{};
};

/// A point of the projective line, stored as an angle in [0, pi).
class Direction {
 public:
  constexpr Direction() = default;
  explicit Direction(double angle) : angle_(reduce(angle)) {}

  static Direction of_vector(double x, double y) { return Direction(std::atan2(y, x)); }

  double angle() const { return angle_; }
  std::array<double, 2> unit() const { return {std::cos(angle_), std::sin(angle_)}; }

  /// Reduces any real angle to [0, pi).
  static double reduce(double angle);

 private:
  double angle_ = 0.0;
};

/// Distance on the projective circle R/(pi Z), in [0, pi/2].
double circular_distance(double x, double y);

struct EigenSplit {
  Direction expanding;
  Direction contracting;
  double top_eigenvalue = 0;  // lambda_+, |lambda_+| > 1
  double wedge = 0;           // |sin(angle(v+) - angle(v-))|
  double log_abs_top = 0;     // log|lambda_+|, finite even when lambda_+ overflows
};

/// g*h with the determinant renormalized. Throws Error("norm overflow; use
/// propagate with log-scaling") if an entry exceeds 1e300.
Sl2 compose(const Sl2& g, const Sl2& h);

/// Projective action: the angle of g (cos t, sin t), reduced mod pi.
Direction act(const Mat2& g, Direction theta);
inline Direction act(const Sl2& g, Direction theta) { return act(g.mat(), theta); }

/// Derivative of the action, 1 / |g (cos t, sin t)|^2. Bounded between
/// |g|^-2 and |g|^2.
double derivative(const Sl2& g, Direction theta);

/// |cos t| + |cos tau_g(t)|; bounded away from zero for one-step transfer
/// matrices, used to probe that constant empirically.
double cos_separation(const Sl2& g, Direction theta);

/// Eigendirections of a hyperbolic matrix. Throws Error("not hyperbolic")
/// when |trace| <= 2 + 1e-12.
EigenSplit eigen_split(const Sl2& m);

/// Same for M = e^log_scale * m, where m is a rescaled running product whose
/// true trace may not be representable.
EigenSplit eigen_split_scaled(const Mat2& m, double log_scale);

/// Rebuilds M = lambda+ P+ + lambda+^-1 P- from the spectral projectors
/// onto v+ along v- and onto v- along v+.
Mat2 reconstruct(const EigenSplit& split);

}  // namespace ablab
