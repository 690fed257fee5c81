// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "ablab/cocycle.hpp"
#include "ablab/error.hpp"
#include "ablab/parallel.hpp"
#include "ablab/pastur.hpp"
#include "ablab/stats.hpp"
#include "doctest.h"

using namespace ablab;
using std::numbers::pi;

TEST_CASE("kappa examples") {
  CHECK(kappa_of(0).kappa == doctest::Approx(pi / 2).epsilon(1e-15));
  const auto p1 = kappa_of(1);
  CHECK(p1.kappa == doctest::Approx(pi / 3).epsilon(1e-15));
  CHECK(std::sin(p1.kappa) * std::sin(p1.kappa) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(kappa_of(std::sqrt(2.0)).kappa == doctest::Approx(pi / 4).epsilon(1e-15));
  for (double e : {-1.9, -0.3, 0.7, 1.5}) {
    const auto p = kappa_of(e);
    CHECK(std::abs(2 * std::cos(p.kappa) - e) <= 1e-12);
    CHECK(std::abs(std::abs(p.mu) - 1) <= 1e-12);
  }
  CHECK_THROWS_WITH(kappa_of(2.0), "outside band");
  CHECK_THROWS_WITH(kappa_of(-3.0), "outside band");
}

TEST_CASE("zeta step without disorder is a rotation") {
  const auto p = kappa_of(0.8);
  PhaseState s = PhaseState::from_zeta({std::cos(0.3), std::sin(0.3)});
  for (int i = 0; i < 10; ++i) {
    const auto next = zeta_step_raw(p, s.zeta, 0.0, 1);
    CHECK(next == p.mu * s.zeta);
    s = zeta_step(p, s, 0.0, -1);
  }
}

TEST_CASE("zeta step against a high precision evaluation") {
  const auto s = zeta_step(kappa_of(1.0), PhaseState{}, 0.1, 1);
  CHECK(std::abs(s.zeta.real() - -0.6483516483516483516) <= 1e-14);
  CHECK(std::abs(s.zeta.imag() - 0.7613410143159900191) <= 1e-14);
  CHECK(std::abs(std::abs(s.zeta) - 1) <= 1e-15);
  CHECK(s.phi >= 0);
  CHECK(s.phi < pi);
}

TEST_CASE("unnormalized drift is first order in lambda") {
  const double lambda = 0.01;
  const auto p = kappa_of(1.0);
  const auto w = sample_word(10000, 3, 0);
  PhaseState s;
  double worst = 0;
  for (auto e : w.signs) {
    worst = std::max(worst, std::abs(std::abs(zeta_step_raw(p, s.zeta, lambda, e)) - 1));
    s = zeta_step(p, s, lambda, e);
    REQUIRE(std::abs(std::abs(s.zeta) - 1) <= 1e-6);
  }
  CHECK(worst > 0);
  CHECK(worst <= 2 * lambda / std::sin(p.kappa));
}

TEST_CASE("phase sum without disorder vanishes") {
  CHECK(fp_lognorm(DisorderConfig(1.0, 0.0), sample_word(1000, 1, 0)) == 0.0);
}

TEST_CASE("phase sum is finite over long sweeps") {
  const auto w = sample_word(1'000'000, 2, 0);
  for (double lambda : {0.1, 0.3, 0.5}) {
    CHECK(std::isfinite(fp_lognorm(DisorderConfig(1.0, lambda), w)));
  }
}

TEST_CASE("analytic exponent") {
  CHECK(analytic_lyapunov(DisorderConfig(1, 0.1)) == doctest::Approx(0.01 / 6).epsilon(1e-15));
  CHECK(analytic_lyapunov(DisorderConfig(std::sqrt(2.0), 0.1)) ==
        doctest::Approx(2.5e-3).epsilon(1e-14));
  for (double e : {0.5, 1.0, 1.7}) {
    const double a = analytic_lyapunov(DisorderConfig(e, 0.05));
    const double b = analytic_lyapunov(DisorderConfig(e, 0.1));
    CHECK(b == 4 * a);
    const double s = std::sin(kappa_of(e).kappa);
    CHECK(a == doctest::Approx(0.05 * 0.05 / (8 * s * s)).epsilon(1e-13));
  }
}

TEST_CASE("free exponent is a boundary effect") {
  const auto est = mc_lyapunov(DisorderConfig(1.0, 0.0), 100000, 8, 1);
  CHECK(est.mean <= 1e-3);
  CHECK(est.mean >= -est.std_error);
  CHECK(est.std_error >= 0);
  CHECK_THROWS_AS(mc_lyapunov(DisorderConfig(1.0, 0.1), 999, 8, 1), Error);
}

TEST_CASE("energy reflection symmetry") {
  const auto a = mc_lyapunov(DisorderConfig(1.0, 0.3), 100000, 32, 5);
  const auto b = mc_lyapunov(DisorderConfig(-1.0, 0.3), 100000, 32, 6);
  CHECK(std::abs(a.mean - b.mean) <= 3 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("phase sum tracks the direct product") {
  const double lambda = 0.2;
  const DisorderConfig cfg(1.0, lambda);
  const auto n = static_cast<std::size_t>(1e5 / (lambda * lambda));
  double worst = 0;
  std::vector<double> diffs(32);
  parallel_for(32, [&](std::size_t i) {
    const auto w = sample_word(n, 77, i);
    PropagateOptions opts;
    opts.store_orbit = false;
    const double direct =
        propagate(cfg, w, Direction(0), matched_initial_vector(), opts).log_vector_growth /
        static_cast<double>(n);
    diffs[i] = std::abs(fp_lognorm(cfg, w) - direct);
  });
  for (double d : diffs) worst = std::max(worst, d);
  CHECK(worst <= 0.5 * lambda * lambda);
}

TEST_CASE("deviation tails") {
  const DisorderConfig cfg(1.0, 0.2);
  const double cap = std::log(step_matrix(cfg, -1).norm());
  const double big = 1.1 * cap / analytic_lyapunov(cfg) + 1;
  const auto tails = deviation_tails(cfg, 2000, {0.0, 0.5, 1.0, 2.0, 4.0, big}, 1000, 3);
  CHECK(tails.front().probability == 1.0);
  CHECK(tails.back().probability == 0.0);
  for (std::size_t i = 1; i < tails.size(); ++i) {
    CHECK(tails[i].probability <= tails[i - 1].probability);
    CHECK(tails[i].bound <= tails[i - 1].bound);
  }
  CHECK_THROWS_AS(deviation_tail(cfg, 2000, 1.0, 999, 3), Error);
  CHECK(deviation_tail(cfg, 2000, 1.0, 1000, 3).probability == tails[2].probability);
}
