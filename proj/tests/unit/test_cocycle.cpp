// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "ablab/cocycle.hpp"
#include "ablab/error.hpp"
#include "ablab/sl2.hpp"
#include "doctest.h"

using namespace ablab;

TEST_CASE("config rejects energies outside the annulus") {
  CHECK_NOTHROW(DisorderConfig(1.0, 0.1));
  CHECK_NOTHROW(DisorderConfig(-1.5, 0.1));
  CHECK_THROWS_AS(DisorderConfig(0.05, 0.1), Error);
  CHECK_THROWS_AS(DisorderConfig(1.95, 0.1), Error);
  CHECK_THROWS_AS(DisorderConfig(2.5, 0.1), Error);
  CHECK_THROWS_AS(DisorderConfig(1.0, -0.1), Error);
}

TEST_CASE("step matrix") {
  const DisorderConfig cfg(1.0, 0.1);
  const Sl2 g = step_matrix(cfg, 1);
  CHECK(g.a() == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(g.b() == -1.0);
  CHECK(g.c() == 1.0);
  CHECK(g.d() == 0.0);
  CHECK(g.det() == 1.0);
  CHECK(step_matrix(cfg, -1).a() == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(step_matrix(cfg, -1).det() == 1.0);
  const DisorderConfig free(1.0, 0.0);
  CHECK(step_matrix(free, 1).a() == step_matrix(free, -1).a());
  CHECK_THROWS_AS(step_matrix(cfg, 0), Error);
}

TEST_CASE("sample word determinism and independence") {
  const auto a = sample_word(1000, 42, 3);
  const auto b = sample_word(1000, 42, 3);
  CHECK(a.signs == b.signs);
  for (auto s : a.signs) REQUIRE((s == 1 || s == -1));
  int equal = 0;
  for (std::uint64_t s = 1; s <= 1000; ++s) equal += sample_word(64, 42, s).signs == sample_word(64, 42, 0).signs;
  CHECK(equal == 0);
  const auto big = sample_word(1'000'000, 7, 0);
  long sum = 0;
  for (auto s : big.signs) sum += s;
  CHECK(std::abs(static_cast<double>(sum)) / 1e6 < 0.005);
  CHECK_THROWS_AS(sample_word(0, 1, 1), Error);
}

TEST_CASE("free products stay bounded") {
  const DisorderConfig cfg(1.0, 0.0);
  const auto w = sample_word(10000, 1, 0);
  const auto t = propagate(cfg, w, Direction(0.3), {1, 0});
  CHECK(t.log_norm / 10000 <= 10.0 / 10000);
  CHECK(t.log_norm >= 0);
}

TEST_CASE("single step and orbit recurrence") {
  const DisorderConfig cfg(1.3, 0.4);
  const auto w = sample_word(1, 9, 0);
  const auto t = propagate(cfg, w, Direction(0.1), {1, 0});
  CHECK(t.log_norm == doctest::Approx(std::log(step_matrix(cfg, w.signs[0]).norm())).epsilon(1e-14));

  const auto w2 = sample_word(500, 9, 1);
  const auto t2 = propagate(cfg, w2, Direction(0.1), {0.6, 0.8});
  REQUIRE(t2.orbit.size() == 501);
  for (std::size_t j = 0; j < 500; ++j) {
    const auto next = act(step_matrix(cfg, w2.signs[j]), t2.orbit[j]);
    REQUIRE(circular_distance(next.angle(), t2.orbit[j + 1].angle()) < 1e-12);
  }
  CHECK(t2.log_norm >= t2.log_vector_growth - 1e-12);
  CHECK(t2.log_norm >= 0);
}

TEST_CASE("trace matches the explicit product") {
  const DisorderConfig cfg(-0.7, 0.3);
  const auto w = sample_word(60, 3, 0);
  Sl2 m;
  for (auto s : w.signs) m = compose(step_matrix(cfg, s), m);
  const auto t = propagate(cfg, w, Direction(0), {1, 0});
  const Sl2 back = t.matrix();
  CHECK(back.a() == doctest::Approx(m.a()).epsilon(1e-10));
  CHECK(back.b() == doctest::Approx(m.b()).epsilon(1e-10));
  CHECK(back.c() == doctest::Approx(m.c()).epsilon(1e-10));
  CHECK(back.d() == doctest::Approx(m.d()).epsilon(1e-10));
  CHECK(t.log_norm == doctest::Approx(std::log(m.norm())).epsilon(1e-12));
  CHECK(op_norm(t.normalized_matrix) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("long products do not overflow") {
  const DisorderConfig cfg(1.9, 1.0, 0.05);
  const double l = log_norm_streamed(cfg, 10'000'000, 1, 0);
  CHECK(std::isfinite(l));
  CHECK(l > 0);
  const auto w = sample_word(1'000'000, 2, 0);
  const auto t = propagate(cfg, w, Direction(0), {1, 0});
  CHECK(std::isfinite(t.log_norm));
  CHECK(t.orbit.size() == 1'000'001);
}

TEST_CASE("streamed and stored words agree") {
  const DisorderConfig cfg(1.0, 0.2);
  const auto w = sample_word(100000, 11, 4);
  const auto t = propagate(cfg, w, Direction(0), {1, 0}, {.store_orbit = false});
  CHECK(t.orbit.empty());
  CHECK(t.log_norm == log_norm_streamed(cfg, 100000, 11, 4));
}

TEST_CASE("submultiplicativity") {
  const DisorderConfig cfg(1.2, 0.5);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto a = sample_word(300, 5, 2 * s), b = sample_word(200, 5, 2 * s + 1);
    const auto la = propagate(cfg, a, Direction(0), {1, 0}).log_norm;
    const auto lb = propagate(cfg, b, Direction(0), {1, 0}).log_norm;
    const auto lab = propagate(cfg, a.concat(b), Direction(0), {1, 0}).log_norm;
    REQUIRE(lab <= la + lb + 1e-9);
  }
}

TEST_CASE("reproducibility") {
  const DisorderConfig cfg(0.8, 0.3);
  const auto w = sample_word(5000, 1, 1);
  const auto a = propagate(cfg, w, Direction(0.4), {0.6, 0.8});
  const auto b = propagate(cfg, w, Direction(0.4), {0.6, 0.8});
  CHECK(a.log_norm == b.log_norm);
  CHECK(a.log_vector_growth == b.log_vector_growth);
  for (std::size_t j = 0; j < a.orbit.size(); ++j) REQUIRE(a.orbit[j].angle() == b.orbit[j].angle());
}

TEST_CASE("growth ratio") {
  const DisorderConfig cfg(1.0, 0.5);
  int strong = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto w = sample_word(200, 13, s);
    const auto t = propagate(cfg, w, Direction(0), {1, 0});
    CHECK(growth_ratio(cfg, w, {1, 0}) ==
          doctest::Approx(t.log_norm - t.log_vector_growth).epsilon(1e-10).scale(1));
    CHECK(growth_ratio(cfg, w, {1, 0}) >= -1e-12);
    if (t.log_norm < std::log(1e3) || t.log_norm > 300) continue;
    const auto split = eigen_split_scaled(t.normalized_matrix, t.log_norm);
    if (split.wedge < 0.55) continue;
    ++strong;
    CHECK(growth_ratio(cfg, w, split.expanding.unit()) <= std::log(2.0));
  }
  CHECK(strong > 10);

  // N = 1 against the closed form log(|g| / |g e1|).
  const auto diag_word = sample_word(1, 1, 0);
  const DisorderConfig single(1.5, 0.2);
  const Sl2 g = step_matrix(single, diag_word.signs[0]);
  const double closed = std::log(g.norm()) - std::log(std::hypot(g.a(), g.c()));
  CHECK(growth_ratio(single, diag_word, {1, 0}) == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("growth ratio along the contracting direction") {
  const DisorderConfig cfg(1.0, 0.5);
  int tested = 0;
  for (std::uint64_t s = 0; s < 5000 && tested < 20; ++s) {
    const auto w = sample_word(60, 17, s);
    const auto t = propagate(cfg, w, Direction(0), {1, 0});
    if (std::abs(t.log_norm - std::log(1e3)) > 0.2) continue;
    const auto split = eigen_split(t.matrix());
    if (split.wedge < 0.5) continue;
    ++tested;
    CHECK(growth_ratio(cfg, w, split.contracting.unit()) >= t.log_norm - std::log(4.0));
  }
  CHECK(tested > 0);
}
