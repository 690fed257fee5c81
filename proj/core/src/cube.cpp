// SPDX-License-Identifier: Apache-2.0
#include "ablab/cube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ablab/error.hpp"
#include "ablab/parallel.hpp"
#include "ablab/rng.hpp"

namespace ablab {

namespace {

std::uint64_t cube_size(int n) { return std::uint64_t{1} << n; }

std::string format_mask(std::uint64_t mask, int n) {
  std::string s = "(";
  for (int j = 0; j < n; ++j) {
    s += ((mask >> j) & 1u) ? "+" : "-";
  }
  return s + ")";
}

// Membership tables for an event family, each predicate evaluated once per
// pattern of its window.
struct EventTables {
  std::vector<std::vector<std::uint8_t>> omega, omega_prime;
  std::vector<double> mes_omega, mes_omega_prime;
};

std::vector<std::uint8_t> tabulate_event(const CubeEvent& ev, int n, std::uint64_t& count) {
  const std::uint64_t size = cube_size(n);
  std::vector<std::int8_t> memo(size, -1);
  std::vector<std::uint8_t> table(size);
  count = 0;
  for (std::uint64_t m = 0; m < size; ++m) {
    const std::uint64_t key = m & ev.window;
    if (memo[key] < 0) memo[key] = ev.contains(key) ? 1 : 0;
    table[m] = static_cast<std::uint8_t>(memo[key]);
    count += table[m];
  }
  return table;
}

void validate_event(const CubeEvent& ev, int n, const char* name, int j) {
  const std::uint64_t size = cube_size(n);
  for (std::uint64_t m = 0; m < size; ++m) {
    if (ev.contains(m) != ev.contains(m & ev.window)) {
      std::ostringstream os;
      os << "window violation: " << name << "[" << j << "] depends on variables outside its window at "
         << format_mask(m, n);
      throw Error(os.str());
    }
  }
}

EventTables tabulate(const EventFamily& family, int n) {
  family.validate(n);
  EventTables t;
  const double size = static_cast<double>(cube_size(n));
  for (const auto& ev : family.omega) {
    std::uint64_t c = 0;
    t.omega.push_back(tabulate_event(ev, n, c));
    t.mes_omega.push_back(static_cast<double>(c) / size);
  }
  for (const auto& ev : family.omega_prime) {
    std::uint64_t c = 0;
    t.omega_prime.push_back(tabulate_event(ev, n, c));
    t.mes_omega_prime.push_back(static_cast<double>(c) / size);
  }
  return t;
}

std::vector<double> sorted_values(const CubeFunction& f) {
  std::vector<double> v = f.values();
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

CubeFunction::CubeFunction(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (n < 1 || n > kMaxTableDim) throw Error("CubeFunction: table mode requires 1 <= n <= 24");
  if (values_.size() != cube_size(n)) throw Error("CubeFunction: table must have 2^n entries");
}

CubeFunction CubeFunction::tabulate(int n, const Evaluator& eval) {
  if (n < 1 || n > kMaxTableDim) throw Error("CubeFunction: table mode requires 1 <= n <= 24");
  std::vector<double> values(cube_size(n));
  for (std::uint64_t m = 0; m < values.size(); ++m) values[m] = eval(m);
  return CubeFunction(n, std::move(values));
}

CubeFunction CubeFunction::callback(int n, Evaluator eval) {
  if (n < 1 || n > 63) throw Error("CubeFunction: callback mode requires 1 <= n <= 63");
  return CubeFunction(n, std::move(eval));
}

const std::vector<double>& CubeFunction::values() const {
  if (!is_table()) throw Error("CubeFunction: operation requires table mode");
  return values_;
}

double CubeFunction::operator()(std::uint64_t mask) const {
  return eval_ ? eval_(mask) : values_[mask];
}

CubeFunction CubeFunction::operator+(const CubeFunction& other) const {
  if (n_ != other.n_) throw Error("CubeFunction: dimension mismatch");
  std::vector<double> sum = values();
  const auto& rhs = other.values();
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += rhs[i];
  return CubeFunction(n_, std::move(sum));
}

CubeFunction influence(const CubeFunction& f, int j) {
  const int n = f.dim();
  if (j < 0 || j >= n) throw Error("influence: j out of range");
  if (n == 1) throw Error("influence: needs n >= 2");
  const auto& v = f.values();
  const std::uint64_t low = (std::uint64_t{1} << j) - 1;
  std::vector<double> out(cube_size(n - 1));
  for (std::uint64_t r = 0; r < out.size(); ++r) {
    // Insert a zero bit at position j.
    const std::uint64_t m = (r & low) | ((r & ~low) << 1);
    out[r] = v[m | (std::uint64_t{1} << j)] - v[m];
  }
  return CubeFunction(n - 1, std::move(out));
}

EventFamily EventFamily::full(int n) {
  EventFamily fam;
  for (int j = 0; j < n; ++j) {
    fam.omega.push_back(CubeEvent::everything(prefix_window(j)));
    fam.omega_prime.push_back(CubeEvent::everything(suffix_window(n, j + 1)));
  }
  return fam;
}

EventFamily EventFamily::full_pairs(int n) {
  EventFamily fam;
  for (int j = 0; j + 1 < n; ++j) fam.omega.push_back(CubeEvent::everything(suffix_window(n, j + 2)));
  return fam;
}

void EventFamily::validate(int n) const {
  for (std::size_t j = 0; j < omega.size(); ++j) validate_event(omega[j], n, "Omega", static_cast<int>(j));
  for (std::size_t j = 0; j < omega_prime.size(); ++j) {
    validate_event(omega_prime[j], n, "Omega'", static_cast<int>(j));
  }
}

std::vector<double> default_t_grid(double lo, double hi, double kappa) {
  if (!(kappa > 0)) throw Error("t-grid: kappa must be positive");
  const double pitch = kappa / 4.0;
  const auto first = static_cast<long long>(std::floor((lo - kappa) / pitch));
  const auto last = static_cast<long long>(std::ceil((hi + kappa) / pitch));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(last - first + 1));
  for (long long k = first; k <= last; ++k) grid.push_back(static_cast<double>(k) * pitch);
  return grid;
}

std::pair<double, std::uint64_t> worst_window(const std::vector<double>& sorted, double kappa,
                                              const std::vector<double>& t_grid) {
  double best_t = t_grid.empty() ? 0.0 : t_grid.front();
  std::uint64_t best = 0;
  for (double t : t_grid) {
    const auto lo = std::upper_bound(sorted.begin(), sorted.end(), t - kappa);
    const auto hi = std::lower_bound(sorted.begin(), sorted.end(), t + kappa);
    const auto count = hi > lo ? static_cast<std::uint64_t>(hi - lo) : 0;
    if (count > best) {
      best = count;
      best_t = t;
    }
  }
  return {best_t, best};
}

std::optional<std::string> monotonicity_witness(const CubeFunction& f) {
  const auto& v = f.values();
  const int n = f.dim();
  for (int j = 0; j < n; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    for (std::uint64_t m = 0; m < v.size(); ++m) {
      if (m & bit) continue;
      if (v[m | bit] < v[m]) {
        std::ostringstream os;
        os << "not monotone: f" << format_mask(m | bit, n) << " = " << v[m | bit] << " < f"
           << format_mask(m, n) << " = " << v[m] << " (variable " << j + 1 << ")";
        return os.str();
      }
    }
  }
  return std::nullopt;
}

double influence_floor(const CubeFunction& f) {
  const auto& v = f.values();
  double floor = std::numeric_limits<double>::infinity();
  for (int j = 0; j < f.dim(); ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    for (std::uint64_t m = 0; m < v.size(); ++m) {
      if (!(m & bit)) floor = std::min(floor, v[m | bit] - v[m]);
    }
  }
  return floor;
}

CubeFunction random_monotone(int n, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(derive_seed(seed, 0xC0B0), index);
  std::vector<double> w(n);
  for (double& x : w) x = 0.5 + rng.uniform();
  struct Term {
    std::uint64_t set;
    double weight;
  };
  std::vector<Term> terms(rng.below(4));
  for (auto& t : terms) {
    const int size = 2 + static_cast<int>(rng.below(2));
    t.set = 0;
    while (std::popcount(t.set) < size) t.set |= std::uint64_t{1} << rng.below(n);
    t.weight = rng.uniform();
  }
  return CubeFunction::tabulate(n, [&](std::uint64_t m) {
    double f = 0;
    for (int j = 0; j < n; ++j) f += ((m >> j) & 1u) ? w[j] : -w[j];
    for (const auto& t : terms) {
      if ((m & t.set) == t.set) f += t.weight;
    }
    return f;
  });
}

CubeFunction linear_sum(int n) {
  return CubeFunction::tabulate(n, [n](std::uint64_t m) {
    return static_cast<double>(2 * std::popcount(m) - n);
  });
}

double lemma1_bound(int n, const EventFamily& events) {
  const auto t = tabulate(events, n);
  double deficit = 0;
  for (int j = 0; j < n; ++j) deficit += 2.0 - t.mes_omega[j] - t.mes_omega_prime[j];
  return 1.0 / std::sqrt(static_cast<double>(n)) + deficit;
}

LevelMassReport lemma1_check(const CubeFunction& f, double kappa, const EventFamily& events,
                             const std::vector<double>& t_grid) {
  const int n = f.dim();
  const auto& v = f.values();
  if (!(kappa > 0)) throw Error("lemma1_check: kappa must be positive");
  if (events.omega.size() != static_cast<std::size_t>(n) ||
      events.omega_prime.size() != static_cast<std::size_t>(n)) {
    throw Error("lemma1_check: event family must have n pairs (Omega_j, Omega'_j)");
  }
  const auto tables = tabulate(events, n);
  if (auto w = monotonicity_witness(f)) throw Error(*w);

  double deficit = 0;
  for (int j = 0; j < n; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    for (std::uint64_t m = 0; m < v.size(); ++m) {
      if (m & bit) continue;
      if (!tables.omega[j][m] || !tables.omega_prime[j][m]) continue;
      const double inf = v[m | bit] - v[m];
      if (inf < kappa) {
        std::ostringstream os;
        os << "influence hypothesis fails: I_" << j + 1 << " = " << inf << " < kappa = " << kappa
           << " at " << format_mask(m, n);
        throw Error(os.str());
      }
    }
    deficit += 2.0 - tables.mes_omega[j] - tables.mes_omega_prime[j];
  }

  const auto sorted = sorted_values(f);
  const auto grid = t_grid.empty() ? default_t_grid(sorted.front(), sorted.back(), kappa) : t_grid;
  const auto [t, count] = worst_window(sorted, kappa, grid);

  LevelMassReport r;
  r.kappa = kappa;
  r.n = n;
  r.mode = MassMode::kExhaustive;
  r.worst_t = t;
  r.worst_count = count;
  r.population = v.size();
  r.worst_mass = static_cast<double>(count) / static_cast<double>(v.size());
  r.bound = 1.0 / std::sqrt(static_cast<double>(n)) + deficit;
  r.ratio = r.worst_mass / r.bound;
  r.holds = r.worst_mass <= r.bound;
  return r;
}

LevelMassReport lemma2_check(const CubeFunction& f, double kappa, double delta,
                             const EventFamily& events, const std::vector<double>& t_grid) {
  const int n = f.dim();
  const auto& v = f.values();
  if (n % 2 != 0) throw Error("lemma2_check: n must be even");
  if (!(kappa > 0)) throw Error("lemma2_check: kappa must be positive");
  if (!(delta >= 0)) throw Error("lemma2_check: delta must be >= 0");
  if (events.omega.size() + 1 != static_cast<std::size_t>(n)) {
    throw Error("lemma2_check: pair family must have n-1 events Omega_j");
  }
  for (std::size_t j = 0; j < events.omega.size(); ++j) {
    if (events.omega[j].window & ~EventFamily::suffix_window(n, static_cast<int>(j) + 2)) {
      throw Error("window violation: pair-form Omega_j may only read eps_{j+2}..eps_n");
    }
  }
  const auto tables = tabulate(events, n);
  if (auto w = monotonicity_witness(f)) throw Error(*w);

  for (int j = 0; j + 1 < n; ++j) {
    if (tables.mes_omega[j] < 1.0 - delta) {
      std::ostringstream os;
      os << "pair hypothesis fails: mes Omega_" << j + 1 << " = " << tables.mes_omega[j]
         << " < 1 - delta";
      throw Error(os.str());
    }
    const std::uint64_t pair = std::uint64_t{3} << j;
    for (std::uint64_t m = 0; m < v.size(); ++m) {
      if ((m & pair) != 0 || !tables.omega[j][m]) continue;
      const double jump = v[m | pair] - v[m];
      if (jump < kappa) {
        std::ostringstream os;
        os << "pair hypothesis fails: f(+,+) - f(-,-) = " << jump << " < kappa at j = " << j + 1
           << ", " << format_mask(m, n);
        throw Error(os.str());
      }
    }
  }

  const auto sorted = sorted_values(f);
  const auto grid = t_grid.empty() ? default_t_grid(sorted.front(), sorted.back(), kappa) : t_grid;
  const auto [t, count] = worst_window(sorted, kappa, grid);

  LevelMassReport r;
  r.kappa = kappa;
  r.n = n;
  r.mode = MassMode::kExhaustive;
  r.worst_t = t;
  r.worst_count = count;
  r.population = v.size();
  r.worst_mass = static_cast<double>(count) / static_cast<double>(v.size());
  r.bound = 1.0 / std::sqrt(static_cast<double>(n)) + static_cast<double>(n) * delta;
  r.ratio = r.worst_mass / r.bound;
  r.holds = r.ratio <= kLemma2Calibration;
  return r;
}

std::pair<double, std::uint64_t> worst_circular_window(const std::vector<double>& sorted,
                                                       double window) {
  constexpr double pi = std::numbers::pi;
  if (!(window > 0)) throw Error("window must be positive");
  if (window > 0.5 * pi) return {0.0, sorted.size()};
  auto count_open = [&](double lo, double hi) -> std::uint64_t {
    const auto a = std::upper_bound(sorted.begin(), sorted.end(), lo);
    const auto b = std::lower_bound(sorted.begin(), sorted.end(), hi);
    return b > a ? static_cast<std::uint64_t>(b - a) : 0;
  };
  const double pitch = window / 4.0;
  const auto steps = static_cast<std::size_t>(std::ceil(pi / pitch));
  double best_t = 0;
  std::uint64_t best = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * pitch;
    const double lo = t - window, hi = t + window;
    std::uint64_t c = count_open(std::max(lo, -1.0), std::min(hi, pi));
    if (lo < 0) c += count_open(lo + pi, pi + 1.0);
    if (hi > pi) c += count_open(-1.0, hi - pi);
    if (c > best) {
      best = c;
      best_t = t;
    }
  }
  return {best_t, best};
}

std::vector<double> tau_values_exhaustive(const DisorderConfig& cfg, int n_steps,
                                          Direction theta0) {
  if (n_steps < 1) throw Error("tau_level_mass: N must be >= 1");
  if (n_steps > 20) throw Error("tau_level_mass: exhaustive mode needs N <= 20; use Monte Carlo");
  const double diag[2] = {cfg.diagonal(-1), cfg.diagonal(1)};
  const int prefix = std::min(n_steps, 6);
  const int rest = n_steps - prefix;
  std::vector<double> out(cube_size(n_steps));

  // Chunks are indexed by the first `prefix` signs; each fills its own slots.
  parallel_for(cube_size(prefix), [&](std::size_t chunk) {
    auto [x0, y0] = theta0.unit();
    for (int k = 0; k < prefix; ++k) {
      const double e = diag[(chunk >> k) & 1u];
      const double nx = e * x0 - y0;
      y0 = x0;
      x0 = nx;
    }
    // Level-order expansion of the remaining signs: entry r at level k holds
    // the vector for the first k remaining signs given by the bits of r.
    std::vector<std::array<double, 2>> level{{x0, y0}};
    for (int k = 0; k < rest; ++k) {
      std::vector<std::array<double, 2>> next(level.size() * 2);
      for (std::size_t r = 0; r < level.size(); ++r) {
        const auto [x, y] = level[r];
        const double norm = std::hypot(x, y);
        for (std::size_t s = 0; s < 2; ++s) {
          const double e = diag[s];
          next[r | (s << k)] = {(e * x - y) / norm, x / norm};
        }
      }
      level = std::move(next);
    }
    for (std::size_t r = 0; r < level.size(); ++r) {
      out[chunk | (r << prefix)] = Direction::of_vector(level[r][0], level[r][1]).angle();
    }
  });
  return out;
}

LevelMassReport tau_level_mass(const DisorderConfig& cfg, int n_steps, Direction theta0,
                               double window, TauMassOptions opts) {
  if (!(window > 0)) throw Error("tau_level_mass: window must be positive");
  std::vector<double> angles;
  if (opts.mode == MassMode::kExhaustive) {
    angles = tau_values_exhaustive(cfg, n_steps, theta0);
  } else {
    if (opts.realizations == 0) throw Error("tau_level_mass: Monte Carlo needs R >= 1");
    angles.resize(opts.realizations);
    parallel_for(opts.realizations, [&](std::size_t r) {
      SignStream signs(opts.seed, r);
      auto [x, y] = theta0.unit();
      for (int k = 0; k < n_steps; ++k) {
        const double e = cfg.diagonal(signs.next());
        const double nx = e * x - y;
        const double norm = std::hypot(nx, x);
        y = x / norm;
        x = nx / norm;
      }
      angles[r] = Direction::of_vector(x, y).angle();
    });
  }
  std::sort(angles.begin(), angles.end());
  const auto [t, count] = worst_circular_window(angles, window);

  LevelMassReport r;
  r.kappa = window;
  r.n = n_steps;
  r.mode = opts.mode;
  r.worst_t = t;
  r.worst_count = count;
  r.population = angles.size();
  r.worst_mass = static_cast<double>(count) / static_cast<double>(angles.size());
  r.bound = kTauMassConstant * cfg.disorder();
  r.ratio = r.bound > 0 ? r.worst_mass / r.bound : INFINITY;
  r.holds = r.worst_mass <= r.bound;
  return r;
}

}  // namespace ablab
