// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>

#include "ablab/cocycle.hpp"
#include "ablab/error.hpp"
#include "ablab/rng.hpp"
#include "ablab/sl2.hpp"
#include "doctest.h"

using namespace ablab;
using std::numbers::pi;

namespace {

// R(a) diag(s, 1/s) R(b) with log s uniform in [0, log max_norm].
Sl2 random_sl2(CounterRng& rng, double max_norm) {
  const double s = std::exp(rng.uniform() * std::log(max_norm));
  return compose(compose(Sl2::rotation(2 * pi * rng.uniform()), Sl2::diag(s)),
                 Sl2::rotation(2 * pi * rng.uniform()));
}

void check_entries(const Mat2& m, double a, double b, double c, double d, double tol) {
  CHECK(std::abs(m.a - a) <= tol);
  CHECK(std::abs(m.b - b) <= tol);
  CHECK(std::abs(m.c - c) <= tol);
  CHECK(std::abs(m.d - d) <= tol);
}

}  // namespace

TEST_CASE("compose examples") {
  CounterRng rng(1, 0);
  const Sl2 g = random_sl2(rng, 10);
  const Sl2 ig = compose(Sl2::identity(), g);
  CHECK(ig.a() == g.a());
  CHECK(ig.d() == g.d());
  const Sl2 d4 = compose(Sl2::diag(2), Sl2::diag(2));
  check_entries(d4.mat(), 4, 0, 0, 0.25, 0);
  const Sl2 r = compose(Sl2::rotation(pi / 6), Sl2::rotation(pi / 3));
  check_entries(r.mat(), 0, -1, 1, 0, 1e-12);
}

TEST_CASE("compose reports overflow") {
  const Sl2 big = Sl2::diag(1e200);
  CHECK_THROWS_WITH(compose(big, big), "norm overflow; use propagate with log-scaling");
}

TEST_CASE("determinant and norm invariants") {
  CounterRng rng(2, 0);
  for (int i = 0; i < 10000; ++i) {
    const Sl2 g = compose(random_sl2(rng, 1e3), random_sl2(rng, 1e3));
    REQUIRE(std::abs(g.det() - 1) <= 8 * std::numeric_limits<double>::epsilon() * g.norm() * g.norm());
    REQUIRE(g.norm() >= 1 - 1e-12);
  }
}

TEST_CASE("act examples") {
  CHECK(act(Sl2::identity(), Direction(1.1)).angle() == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(act(Sl2::rotation(pi / 6), Direction(0.2)).angle() ==
        doctest::Approx(0.2 + pi / 6).epsilon(1e-14));
  CHECK(act(Sl2::diag(2), Direction(pi / 4)).angle() ==
        doctest::Approx(0.2449786631268641).epsilon(1e-14));
  CHECK(act(Sl2::rotation(pi / 2), Direction(pi / 2)).angle() < 1e-15);
}

TEST_CASE("direction stays reduced") {
  for (double a : {-10.0, -pi, -1e-300, 0.0, pi, 3 * pi + 0.5, 1e6}) {
    const double r = Direction(a).angle();
    CHECK(r >= 0);
    CHECK(r < pi);
  }
}

TEST_CASE("cocycle law and chain rule") {
  CounterRng rng(3, 0);
  for (int i = 0; i < 100000; ++i) {
    const Sl2 g = random_sl2(rng, 10), h = random_sl2(rng, 10);
    const Direction t(pi * rng.uniform());
    const Sl2 gh = compose(g, h);
    REQUIRE(circular_distance(act(gh, t).angle(), act(g, act(h, t)).angle()) <= 1e-9);
    const double lhs = derivative(gh, t);
    const double rhs = derivative(g, act(h, t)) * derivative(h, t);
    REQUIRE(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
  }
}

TEST_CASE("derivative bounds") {
  CounterRng rng(4, 0);
  for (int i = 0; i < 100000; ++i) {
    const Sl2 g = random_sl2(rng, 1e6);
    const Direction t(pi * rng.uniform());
    const double n2 = g.norm() * g.norm();
    const double d = derivative(g, t);
    REQUIRE(d >= (1 - 1e-9) / n2);
    REQUIRE(d <= (1 + 1e-9) * n2);
  }
}

TEST_CASE("derivative examples") {
  CHECK(derivative(Sl2::identity(), Direction(0.7)) == doctest::Approx(1.0).epsilon(1e-15));
  const double s = 3.0;
  CHECK(derivative(Sl2::diag(s), Direction(0)) == doctest::Approx(1 / (s * s)).epsilon(1e-15));
  CHECK(derivative(Sl2::diag(s), Direction(pi / 2)) == doctest::Approx(s * s).epsilon(1e-14));
}

TEST_CASE("derivative matches finite differences") {
  CounterRng rng(5, 0);
  const double h = 1e-7;
  for (int i = 0; i < 100000; ++i) {
    const Sl2 g = random_sl2(rng, 3);
    const double t = pi * rng.uniform();
    const double up = act(g, Direction(t + h)).angle();
    const double down = act(g, Direction(t - h)).angle();
    double diff = up - down;
    if (diff > pi / 2) diff -= pi;
    if (diff < -pi / 2) diff += pi;
    const double fd = diff / (2 * h);
    const double d = derivative(g, Direction(t));
    REQUIRE(std::abs(fd - d) <= 1e-6 * std::max(1.0, d));
  }
}

TEST_CASE("eigen split of a diagonal matrix") {
  const auto s = eigen_split(Sl2::diag(2));
  CHECK(s.expanding.angle() == doctest::Approx(0).scale(1));
  CHECK(s.contracting.angle() == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(s.top_eigenvalue == doctest::Approx(2).epsilon(1e-15));
  CHECK(s.wedge == doctest::Approx(1).epsilon(1e-15));
}

TEST_CASE("eigen split against a generic eigensolver") {
  const Sl2 m(2, 1, 1, 1);
  const auto s = eigen_split(m);
  Eigen::Matrix2d e;
  e << m.a(), m.b(), m.c(), m.d();
  Eigen::EigenSolver<Eigen::Matrix2d> solver(e);
  int top = std::abs(solver.eigenvalues()[0].real()) > std::abs(solver.eigenvalues()[1].real()) ? 0 : 1;
  const Eigen::Vector2d vt = solver.eigenvectors().col(top).real();
  const Eigen::Vector2d vb = solver.eigenvectors().col(1 - top).real();
  CHECK(s.top_eigenvalue == doctest::Approx(solver.eigenvalues()[top].real()).epsilon(1e-10));
  CHECK(s.top_eigenvalue == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-14));
  CHECK(circular_distance(s.expanding.angle(), std::atan2(vt[1], vt[0])) < 1e-10);
  CHECK(circular_distance(s.contracting.angle(), std::atan2(vb[1], vb[0])) < 1e-10);
  CHECK(std::abs(s.top_eigenvalue * (1 / s.top_eigenvalue) - 1) <= 1e-9);
}

TEST_CASE("elliptic and parabolic matrices are rejected") {
  CHECK_THROWS_WITH(eigen_split(Sl2::rotation(0.3)), "not hyperbolic");
  CHECK_THROWS_WITH(eigen_split(Sl2(1, 1, 0, 1)), "not hyperbolic");
}

TEST_CASE("reconstruction and norm identity over random products") {
  const DisorderConfig cfg(1.0, 0.5);
  CounterRng rng(6, 0);
  int tested = 0;
  for (std::uint64_t i = 0; tested < 10000; ++i) {
    const auto word = sample_word(1 + rng.below(40), 7, i);
    Sl2 m = Sl2::identity();
    for (auto e : word.signs) m = compose(m, step_matrix(cfg, e));
    if (std::abs(m.trace()) <= 2 + 1e-12) continue;
    ++tested;
    const auto s = eigen_split(m);
    const Mat2 r = reconstruct(s);
    const double scale = m.mat().max_abs();
    REQUIRE(std::abs(r.a - m.a()) <= 1e-8 * scale);
    REQUIRE(std::abs(r.b - m.b()) <= 1e-8 * scale);
    REQUIRE(std::abs(r.c - m.c()) <= 1e-8 * scale);
    REQUIRE(std::abs(r.d - m.d()) <= 1e-8 * scale);
    if (std::abs(s.top_eigenvalue) >= 2) {
      const double q = m.norm() * s.wedge / std::abs(s.top_eigenvalue);
      REQUIRE(q >= 0.25);
      REQUIRE(q <= 4);
    }
  }
}
