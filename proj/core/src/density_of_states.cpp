// SPDX-License-Identifier: Apache-2.0
#include "ablab/density_of_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ablab/error.hpp"
#include "ablab/parallel.hpp"
#include "ablab/rng.hpp"
#include "ablab/stats.hpp"

namespace ablab {

std::uint64_t sturm_count(std::span<const double> diagonal, double energy) {
  // A vanishing pivot is replaced by a tiny positive one, which counts an
  // eigenvalue equal to E as not below it.
  constexpr double kPivotFloor = std::numeric_limits<double>::min();
  std::uint64_t negatives = 0;
  double q = 1.0;
  bool first = true;
  for (double d : diagonal) {
    q = first ? d - energy : d - energy - 1.0 / q;
    first = false;
    if (q == 0.0) q = kPivotFloor;
    negatives += q < 0.0;
  }
  return negatives;
}

double IdsCurve::increment_stderr(std::size_t i, std::size_t j) const {
  if (counts.empty() || realizations < 2) return 0.0;
  const std::size_t g = grid.size();
  std::vector<double> diff(realizations);
  for (std::size_t r = 0; r < realizations; ++r) {
    diff[r] = (static_cast<double>(counts[r * g + j]) - static_cast<double>(counts[r * g + i])) /
              static_cast<double>(box_size);
  }
  return mean_stderr(diff).std_error;
}

IdsCurve ids_curve(double disorder, std::span<const double> grid, std::size_t box_size,
                   std::uint64_t realizations, std::uint64_t seed) {
  if (box_size < 500) throw Error("ids_curve: need L >= 500");
  if (realizations < 50) throw Error("ids_curve: need R >= 50");
  if (!(disorder >= 0)) throw Error("ids_curve: lambda must be >= 0");
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end())) {
    throw Error("ids_curve: grid must be nonempty and increasing");
  }
  const std::size_t g = grid.size();
  IdsCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.box_size = box_size;
  curve.realizations = realizations;
  curve.counts.resize(realizations * g);
  parallel_for(realizations, [&](std::size_t r) {
    SignStream signs(seed, r);
    std::vector<double> diag(box_size);
    for (double& d : diag) d = disorder * signs.next();
    for (std::size_t k = 0; k < g; ++k) {
      curve.counts[r * g + k] = static_cast<std::uint32_t>(sturm_count(diag, grid[k]));
    }
  });
  std::vector<double> column(realizations);
  for (std::size_t k = 0; k < g; ++k) {
    for (std::size_t r = 0; r < realizations; ++r) {
      column[r] = static_cast<double>(curve.counts[r * g + k]) / static_cast<double>(box_size);
    }
    const auto ms = mean_stderr(column);
    curve.values.push_back(ms.mean);
    curve.std_errors.push_back(ms.std_error);
  }
  return curve;
}

std::vector<double> uniform_grid(double lo, double hi, double pitch) {
  if (!(pitch > 0) || hi < lo) throw Error("uniform_grid: need pitch > 0 and lo <= hi");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / pitch + 1e-9));
  std::vector<double> grid(n + 1);
  for (std::size_t k = 0; k <= n; ++k) grid[k] = lo + static_cast<double>(k) * pitch;
  return grid;
}

double free_ids(double energy) {
  if (energy <= -2) return 0.0;
  if (energy >= 2) return 1.0;
  return 1.0 - std::acos(energy / 2) / std::numbers::pi;
}

namespace {

std::size_t grid_index(const std::vector<double>& grid, double e) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), e);
  std::size_t best = grid.size();
  double best_gap = std::numeric_limits<double>::infinity();
  for (auto cand : {it, it == grid.begin() ? it : it - 1}) {
    if (cand == grid.end()) continue;
    const double gap = std::abs(*cand - e);
    if (gap < best_gap) {
      best_gap = gap;
      best = static_cast<std::size_t>(cand - grid.begin());
    }
  }
  if (best == grid.size() || best_gap > 1e-9 * (1 + std::abs(e))) {
    throw Error("holder_fit: energy " + std::to_string(e) + " is not on the grid");
  }
  return best;
}

}  // namespace

HolderFit holder_fit(const IdsCurve& curve, std::span<const double> centers, double h_low,
                     double h_high) {
  if (centers.empty()) throw Error("holder_fit: no centers");
  if (!(h_low > 0) || h_high < h_low) throw Error("holder_fit: need 0 < h_low <= h_high");
  HolderFit fit;
  fit.centers.assign(centers.begin(), centers.end());
  for (double h = h_low; h <= h_high * (1 + 1e-12); h *= 2) fit.h.push_back(h);
  if (fit.h.size() < 4) throw Error("holder_fit: need at least 4 dyadic scales");

  std::vector<double> lx, ly;
  for (double h : fit.h) {
    double best = -1;
    double best_err = 0;
    for (double c : centers) {
      const std::size_t lo = grid_index(curve.grid, c - h);
      const std::size_t hi = grid_index(curve.grid, c + h);
      const double inc = curve.values[hi] - curve.values[lo];
      if (inc > best) {
        best = inc;
        best_err = curve.increment_stderr(lo, hi);
      }
    }
    if (!(best > 0) || best < 2 * best_err) {
      throw Error("statistically unresolved; increase L*R");
    }
    fit.increments.push_back(best);
    lx.push_back(std::log(h));
    ly.push_back(std::log(best));
  }
  const auto lf = linear_fit(lx, ly);
  fit.exponent = lf.slope;
  fit.residual = lf.residual;
  return fit;
}

double halperin_alpha(double disorder) {
  if (!(disorder > 0)) throw Error("halperin_alpha: lambda must be positive");
  // arccosh(1 + x) = log1p(x + sqrt(x (2 + x))), accurate for small x.
  return 2.0 * std::numbers::ln2 / std::log1p(disorder + std::sqrt(disorder * (2.0 + disorder)));
}

}  // namespace ablab
