// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "ablab/density_of_states.hpp"
#include "ablab/error.hpp"
#include "ablab/rng.hpp"
#include "ablab/stats.hpp"
#include "doctest.h"

using namespace ablab;

namespace {

Eigen::VectorXd dense_spectrum(const std::vector<double>& diag) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

std::uint64_t dense_count(const Eigen::VectorXd& spectrum, double e) {
  std::uint64_t c = 0;
  for (double x : spectrum) c += x < e;
  return c;
}

}  // namespace

TEST_CASE("sturm count examples") {
  const std::vector<double> zero(3, 0.0);
  CHECK(sturm_count(zero, 1.0) == 2);
  CHECK(sturm_count(zero, -1.5) == 0);
  CHECK(sturm_count(zero, 1.5) == 3);
  const std::vector<double> pot{0.5, -0.5, 0.5, 0.5, -0.5};
  CHECK(sturm_count(pot, -2.6) == 0);
  CHECK(sturm_count(pot, 2.6) == 5);
}

TEST_CASE("sturm count matches a dense eigensolver") {
  CounterRng rng(77, 0);
  int mismatches = 0, ties = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t l = 1 + rng.below(100);
    const double lambda = 2 * rng.uniform();
    const bool bernoulli = trial % 2 == 0;
    std::vector<double> diag(l);
    for (double& d : diag) d = bernoulli ? lambda * (rng.below(2) ? 1.0 : -1.0) : lambda * (2 * rng.uniform() - 1);
    const auto spectrum = dense_spectrum(diag);
    // Energies both random and placed exactly on the potential values. An
    // eigenvalue equal to E up to rounding has no exact dense count.
    for (int k = 0; k < 5; ++k) {
      const double e = k < 3 ? (2 + lambda) * (2 * rng.uniform() - 1) : diag[rng.below(l)];
      if ((spectrum.array() - e).abs().minCoeff() < 1e-9) {
        ++ties;
        continue;
      }
      mismatches += sturm_count(diag, e) != dense_count(spectrum, e);
    }
  }
  CHECK(mismatches == 0);
  CHECK(ties < 1000);
  const std::vector<double> single{0.3};
  CHECK(sturm_count(single, 0.3) == 0);
  CHECK(sturm_count(single, std::nextafter(0.3, 1.0)) == 1);
}

TEST_CASE("free integrated density") {
  CHECK(free_ids(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(free_ids(1.0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(free_ids(-3.0) == 0.0);
  CHECK(free_ids(3.0) == 1.0);
  const std::vector<double> grid{0.0, 1.0};
  const auto curve = ids_curve(0.0, grid, 5000, 100, 1);
  CHECK(std::abs(curve.values[0] - 0.5) <= 2e-3);
  CHECK(std::abs(curve.values[1] - 2.0 / 3) <= 2e-3);
}

TEST_CASE("curve invariants") {
  const auto grid = uniform_grid(-2.5, 2.5, 0.125);
  CHECK(grid.size() == 41);
  const auto curve = ids_curve(0.5, grid, 600, 60, 3);
  const std::size_t g = grid.size();
  for (std::size_t r = 0; r < curve.realizations; ++r) {
    for (std::size_t k = 1; k < g; ++k) REQUIRE(curve.counts[r * g + k] >= curve.counts[r * g + k - 1]);
  }
  CHECK(curve.values.front() == 0.0);
  CHECK(curve.values.back() == 1.0);
  for (std::size_t i = 0; i < g; ++i) {
    REQUIRE(curve.values[i] >= 0);
    REQUIRE(curve.values[i] <= 1);
    // N(E) + N(-E) per realization, so the standard error includes their correlation.
    const std::size_t j = g - 1 - i;
    std::vector<double> sums(curve.realizations);
    for (std::size_t r = 0; r < curve.realizations; ++r) {
      sums[r] = static_cast<double>(curve.counts[r * g + i] + curve.counts[r * g + j]) / 600.0;
    }
    const auto ms = mean_stderr(sums);
    REQUIRE(std::abs(ms.mean - 1) <= 3 * ms.std_error + 1e-12);
  }
  CHECK_THROWS_AS(ids_curve(0.5, grid, 499, 60, 3), Error);
  CHECK_THROWS_AS(ids_curve(0.5, grid, 600, 49, 3), Error);
}

TEST_CASE("same seed reproduces the curve") {
  const auto grid = uniform_grid(-1, 1, 0.5);
  const auto a = ids_curve(0.3, grid, 500, 50, 9);
  const auto b = ids_curve(0.3, grid, 500, 50, 9);
  CHECK(a.values == b.values);
  CHECK(a.counts == b.counts);
}

TEST_CASE("synthetic square root singularity") {
  IdsCurve curve;
  curve.grid = uniform_grid(-1, 1, 0x1.0p-12);
  for (double e : curve.grid) curve.values.push_back(std::sqrt(std::max(e, 0.0)));
  curve.std_errors.assign(curve.grid.size(), 0.0);
  const std::vector<double> centers{0.0};
  const auto fit = holder_fit(curve, centers, 0x1.0p-10, 0x1.0p-3);
  CHECK(std::abs(fit.exponent - 0.5) <= 0.02);
  CHECK(fit.residual < 0.1);
  CHECK(fit.h.size() == 8);
}

TEST_CASE("free curve is Lipschitz inside the band") {
  const double pitch = 0x1.0p-9;
  std::vector<double> grid;
  for (int i = -128; i <= 128; ++i) grid.push_back(1.0 + i * pitch);
  const auto curve = ids_curve(0.0, grid, 5000, 50, 2);
  std::vector<double> centers;
  for (int j = -4; j <= 4; ++j) centers.push_back(1.0 + j * 0x1.0p-7);
  const auto fit = holder_fit(curve, centers, 0x1.0p-8, 0x1.0p-4);
  CHECK(fit.exponent >= 0.9);
  CHECK(fit.exponent <= 1.1);
}

TEST_CASE("holder fit preconditions") {
  IdsCurve curve;
  curve.grid = uniform_grid(-4, 4, 0.25);
  curve.values.assign(curve.grid.size(), 0.5);
  curve.std_errors.assign(curve.grid.size(), 0.0);
  const std::vector<double> centers{0.0};
  CHECK_THROWS_AS(holder_fit(curve, centers, 0.25, 0.5), Error);
  CHECK_THROWS_WITH(holder_fit(curve, centers, 0.25, 0.25 * 8), doctest::Contains("unresolved"));
}

TEST_CASE("halperin exponent") {
  CHECK(std::abs(halperin_alpha(1.0) - 1.0526489604238519) <= 1e-14);
  CHECK(std::abs(halperin_alpha(0.5) - 1.4404200904125565) <= 1e-14);
  CHECK(std::abs(halperin_alpha(1.0) - 1.052650) <= 1e-5);
  CHECK(std::abs(halperin_alpha(0.5) - 1.440422) <= 1e-5);
  const double asym = 2 * std::numbers::ln2 / std::sqrt(2e-4);
  CHECK(std::abs(halperin_alpha(1e-4) / asym - 1) <= 0.01);
  CHECK(std::abs(halperin_alpha(1e-4) - 98.0266312) <= 1e-6);
  CHECK_THROWS_AS(halperin_alpha(0.0), Error);
  CHECK_THROWS_AS(halperin_alpha(-1.0), Error);
}
