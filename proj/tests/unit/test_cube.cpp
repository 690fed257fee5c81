// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cmath>
#include <string>

#include "ablab/cocycle.hpp"
#include "ablab/cube.hpp"
#include "ablab/error.hpp"
#include "ablab/parallel.hpp"
#include "ablab/rng.hpp"
#include "doctest.h"

using namespace ablab;

namespace {

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Two largest layers of the cube: the measure cap for a set with no chain of length 3.
double two_layer_bound(int n) {
  return (binomial(n, n / 2) + binomial(n, n / 2 + 1)) / std::ldexp(1.0, n);
}

CubeFunction random_table(int n, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  return CubeFunction::tabulate(n, [&](std::uint64_t) { return rng.uniform() - 0.5; });
}

bool has_message(const std::function<void()>& body, const std::string& needle) {
  try {
    body();
  } catch (const Error& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("influence examples") {
  const auto lin = linear_sum(6);
  for (int j = 0; j < 6; ++j) {
    const auto d = influence(lin, j);
    for (double v : d.values()) REQUIRE(v == 2.0);
  }
  const auto prod = CubeFunction::tabulate(2, [](std::uint64_t m) {
    return ((m & 1) ? 1.0 : -1.0) * ((m & 2) ? 1.0 : -1.0);
  });
  CHECK(influence(prod, 0).values() == std::vector<double>{-2.0, 2.0});
  CHECK(monotonicity_witness(prod).has_value());
  const auto maj = CubeFunction::tabulate(3, [](std::uint64_t m) {
    return std::popcount(m) >= 2 ? 1.0 : -1.0;
  });
  for (int j = 0; j < 3; ++j) CHECK(influence(maj, j).values() == std::vector<double>{0, 2, 2, 0});
  CHECK_THROWS_WITH(influence(maj, 3), "influence: j out of range");
}

TEST_CASE("influence is linear") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_table(8, 2 * s), g = random_table(8, 2 * s + 1);
    for (int j = 0; j < 8; ++j) {
      const auto lhs = influence(f + g, j).values();
      const auto a = influence(f, j).values(), b = influence(g, j).values();
      for (std::size_t i = 0; i < lhs.size(); ++i) REQUIRE(lhs[i] == a[i] + b[i]);
    }
  }
}

TEST_CASE("callback mode") {
  const auto f = CubeFunction::callback(40, [](std::uint64_t m) { return double(std::popcount(m)); });
  CHECK(!f.is_table());
  CHECK(f(0xFF) == 8.0);
  CHECK_THROWS_AS(f.values(), Error);
  CHECK_THROWS_AS(CubeFunction(25, std::vector<double>{}), Error);
}

TEST_CASE("exact binomial level masses") {
  const auto f = linear_sum(16);
  const auto r1 = lemma1_check(f, 2.0, EventFamily::full(16), {0.0});
  CHECK(r1.worst_count == 12870);
  CHECK(r1.population == 65536);
  CHECK(r1.worst_mass == doctest::Approx(0.19638).epsilon(1e-4));
  CHECK(r1.bound == 0.25);
  CHECK(r1.holds);

  const auto r2 = lemma2_check(f, 4.0, 0.0, EventFamily::full_pairs(16), {0.0});
  CHECK(r2.worst_count == 35750);
  CHECK(r2.worst_mass == doctest::Approx(0.5455).epsilon(1e-4));
  CHECK(r2.ratio == doctest::Approx(2.1820).epsilon(1e-4));
}

TEST_CASE("single influence bound exceeds 1/sqrt(n) on the linear family") {
  const auto r = lemma1_check(linear_sum(16), 2.0, EventFamily::full(16));
  CHECK(r.worst_count == 24310);
  CHECK(r.worst_mass > r.bound);
  CHECK(!r.holds);
  CHECK(r.worst_mass <= two_layer_bound(16));
}

TEST_CASE("injective levels give mass 2^-n") {
  const int n = 10;
  const auto f = CubeFunction::tabulate(n, [n](std::uint64_t m) {
    double v = 0;
    for (int j = 0; j < n; ++j) v += ((m >> j) & 1u) ? std::ldexp(1.0, j) : -std::ldexp(1.0, j);
    return v;
  });
  const auto r = lemma1_check(f, 0.5, EventFamily::full(n));
  CHECK(r.worst_count == 1);
  CHECK(r.worst_mass == std::ldexp(1.0, -n));
  CHECK(r.holds);
}

TEST_CASE("shrinking events inflates the bound by their deficits") {
  const int n = 16;
  auto fam = EventFamily::full(n);
  const double full = lemma1_bound(n, fam);
  CHECK(full == 0.25);
  // Drop the all-minus pattern on four window bits: measure 1 - 1/16.
  auto shrink = [](CubeEvent& ev) {
    if (std::popcount(ev.window) < 4) return 0;
    std::uint64_t four = 0, w = ev.window;
    for (int k = 0; k < 4; ++k) {
      const std::uint64_t low = w & (~w + 1);
      four |= low;
      w &= w - 1;
    }
    ev.contains = [four](std::uint64_t m) { return (m & four) != 0; };
    return 1;
  };
  int shrunk = 0;
  for (auto& ev : fam.omega) shrunk += shrink(ev);
  for (auto& ev : fam.omega_prime) shrunk += shrink(ev);
  fam.validate(n);
  CHECK(shrunk > n);
  CHECK(lemma1_bound(n, fam) - full == shrunk / 16.0);
}

TEST_CASE("hypothesis violations are reported") {
  const auto prod = CubeFunction::tabulate(3, [](std::uint64_t m) {
    return ((m & 1) ? 1.0 : -1.0) * ((m & 2) ? 1.0 : -1.0);
  });
  CHECK(has_message([&] { lemma1_check(prod, 1.0, EventFamily::full(3)); }, "not monotone"));
  CHECK(has_message([&] { lemma1_check(linear_sum(6), 3.0, EventFamily::full(6)); },
                    "influence hypothesis fails"));
  auto bad = EventFamily::full(6);
  bad.omega[2].contains = [](std::uint64_t m) { return (m & 32) != 0; };
  CHECK(has_message([&] { bad.validate(6); }, "window violation"));
  auto wide = EventFamily::full_pairs(6);
  wide.omega[0].window = EventFamily::suffix_window(6, 1);
  CHECK(has_message([&] { lemma2_check(linear_sum(6), 4.0, 0.0, wide); }, "window violation"));
  CHECK(has_message([&] { lemma2_check(linear_sum(6), 5.0, 0.0, EventFamily::full_pairs(6)); },
                    "pair hypothesis fails"));
  auto thin = EventFamily::full_pairs(6);
  thin.omega[0].contains = [](std::uint64_t m) { return (m & 4) != 0; };
  CHECK(has_message([&] { lemma2_check(linear_sum(6), 4.0, 0.25, thin); }, "pair hypothesis fails"));
  CHECK_NOTHROW(lemma2_check(linear_sum(6), 4.0, 0.5, thin));
  CHECK(has_message([&] { lemma2_check(linear_sum(5), 4.0, 0.0, EventFamily::full_pairs(5)); },
                    "n must be even"));
}

TEST_CASE("pair bound is vacuous at delta = 1") {
  const auto r = lemma2_check(linear_sum(8), 4.0, 1.0, EventFamily::full_pairs(8));
  CHECK(r.bound >= 8);
  CHECK(r.holds);
}

TEST_CASE("pair ratios do not grow with n") {
  double first = 0;
  for (int n : {8, 12, 16, 20}) {
    const auto r = lemma2_check(linear_sum(n), 4.0, 0.0, EventFamily::full_pairs(n));
    if (n == 8) first = r.ratio;
    CHECK(r.ratio <= kLemma2Calibration);
    CHECK(r.ratio <= 1.5 * first);
  }
}

TEST_CASE("random monotone corpus respects the two-layer cap") {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const int n = 8 + static_cast<int>(i % 9);
    const auto f = random_monotone(n, 2024, i);
    REQUIRE(!monotonicity_witness(f).has_value());
    const double kappa = influence_floor(f);
    REQUIRE(kappa > 0);
    const auto r = lemma1_check(f, kappa, EventFamily::full(n));
    REQUIRE(r.worst_mass <= two_layer_bound(n));
  }
}

TEST_CASE("projective level mass") {
  const DisorderConfig free(1.0, 0.0);
  CHECK(tau_level_mass(free, 10, Direction(0), 0.01).worst_mass == 1.0);
  const DisorderConfig cfg(1.0, 0.25);
  CHECK_THROWS_AS(tau_level_mass(cfg, 21, Direction(0), 0.03), Error);
  const auto ex = tau_level_mass(cfg, 16, Direction(0), 0.25 / 8);
  CHECK(ex.population == 65536);
  CHECK(ex.mode == MassMode::kExhaustive);
  CHECK(ex.worst_mass <= 8 * 0.25);

  TauMassOptions mc{MassMode::kMonteCarlo, 200000, 5};
  const auto est = tau_level_mass(cfg, 16, Direction(0), 0.25 / 8, mc);
  const double se = std::sqrt(ex.worst_mass * (1 - ex.worst_mass) / 200000.0);
  CHECK(std::abs(est.worst_mass - ex.worst_mass) <= 3 * se);
}

TEST_CASE("exhaustive enumeration matches direct products") {
  const DisorderConfig cfg(1.3, 0.4);
  const auto values = tau_values_exhaustive(cfg, 9, Direction(0.2));
  for (std::uint64_t m = 0; m < values.size(); m += 7) {
    Sl2 g;
    for (int k = 0; k < 9; ++k) g = compose(step_matrix(cfg, ((m >> k) & 1u) ? 1 : -1), g);
    REQUIRE(circular_distance(act(g, Direction(0.2)).angle(), values[m]) < 1e-12);
  }
}

TEST_CASE("exhaustive counts do not depend on thread count") {
  const DisorderConfig cfg(0.7, 0.3);
  set_thread_count(1);
  const auto a = tau_level_mass(cfg, 14, Direction(0), 0.05);
  set_thread_count(3);
  const auto b = tau_level_mass(cfg, 14, Direction(0), 0.05);
  set_thread_count(0);
  CHECK(a.worst_count == b.worst_count);
  CHECK(a.worst_t == b.worst_t);
}

TEST_CASE("window scan") {
  const std::vector<double> sorted{0.0, 0.1, 0.2, 1.0, 3.1};
  const auto [t, count] = worst_window(sorted, 0.15, default_t_grid(0.0, 3.1, 0.15));
  CHECK(count == 3);
  CHECK(std::abs(t - 0.1) <= 0.05);
  const auto [ct, cc] = worst_circular_window({0.01, 0.02, 3.13}, 0.05);
  CHECK(cc == 3);
  (void)ct;
}
