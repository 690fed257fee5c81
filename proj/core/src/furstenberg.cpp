// SPDX-License-Identifier: Apache-2.0
#include "ablab/furstenberg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ablab/cube.hpp"
#include "ablab/error.hpp"
#include "ablab/parallel.hpp"
#include "ablab/pastur.hpp"
#include "ablab/stats.hpp"

namespace ablab {

namespace {

constexpr double kPi = std::numbers::pi;

// e^{2i tau_g(theta)} from the image vector (u, v) = g (cos theta, sin theta).
std::complex<double> doubled_phase(double u, double v) {
  const double r2 = u * u + v * v;
  return {(u * u - v * v) / r2, 2.0 * u * v / r2};
}

double residual_from_differences(const std::vector<std::vector<std::complex<double>>>& diff) {
  double worst = 0;
  for (const auto& d : diff) {
    std::vector<double> re(d.size()), im(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      re[i] = d[i].real();
      im[i] = d[i].imag();
    }
    const double n = static_cast<double>(d.size());
    worst = std::max(worst, std::hypot(pairwise_sum(re) / n, pairwise_sum(im) / n));
  }
  return worst;
}

// diff[k-1][i] = f_k(theta_i) - (expected f_k o tau_g at theta_i), where
// `image_mean` fills the expectation for one sample.
template <class F>
double stationarity_core(const EmpiricalMeasure& m, F&& image_mean) {
  if (m.count() == 0) throw Error("stationarity residual: empty measure");
  std::vector<std::vector<std::complex<double>>> diff(
      kStationarityModes, std::vector<std::complex<double>>(m.count()));
  parallel_for(m.count(), [&](std::size_t i) {
    const double t = m.samples[i];
    const double c = std::cos(t), s = std::sin(t);
    std::array<std::complex<double>, kStationarityModes> expect{};
    image_mean(i, c, s, expect);
    const std::complex<double> z = doubled_phase(c, s);
    std::complex<double> zk = 1.0;
    for (int k = 0; k < kStationarityModes; ++k) {
      zk *= z;
      diff[k][i] = zk - expect[k];
    }
  });
  return residual_from_differences(diff);
}

void accumulate_powers(std::complex<double> z, double weight,
                       std::array<std::complex<double>, kStationarityModes>& acc) {
  std::complex<double> zk = 1.0;
  for (int k = 0; k < kStationarityModes; ++k) {
    zk *= z;
    acc[k] += weight * zk;
  }
}

std::vector<double> doubled(const std::vector<double>& x) {
  std::vector<double> x2(2 * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x2[i] = x[i];
    x2[i + x.size()] = x[i] + kPi;
  }
  return x2;
}

double max_closed_arc(const std::vector<double>& x, const std::vector<double>& x2, double r) {
  const std::size_t n = x.size();
  if (n == 0) return 0;
  if (r >= kPi) return 1.0;
  std::size_t j = 0, best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    j = std::max(j, i);
    while (j < i + n && x2[j] - x[i] <= r) ++j;
    best = std::max(best, j - i);
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

}  // namespace

EmpiricalMeasure EmpiricalMeasure::from_angles(std::vector<double> angles) {
  for (double& a : angles) a = Direction::reduce(a);
  std::sort(angles.begin(), angles.end());
  EmpiricalMeasure m;
  m.samples = std::move(angles);
  return m;
}

double EmpiricalMeasure::mass(double start, double length) const {
  if (samples.empty()) return 0;
  if (length >= kPi) return 1.0;
  if (length <= 0) return 0;
  const double a = Direction::reduce(start);
  const double b = a + length;
  auto count = [&](double lo, double hi) {
    return static_cast<double>(std::lower_bound(samples.begin(), samples.end(), hi) -
                               std::lower_bound(samples.begin(), samples.end(), lo));
  };
  double c = count(a, std::min(b, kPi));
  if (b > kPi) c += count(0.0, b - kPi);
  return c / static_cast<double>(samples.size());
}

double DiscreteSl2Measure::total_weight() const {
  std::vector<double> w;
  w.reserve(atoms.size());
  for (const auto& a : atoms) w.push_back(a.weight);
  return pairwise_sum(w);
}

DiscreteSl2Measure DiscreteSl2Measure::bernoulli(const DisorderConfig& cfg) {
  DiscreteSl2Measure mu;
  mu.atoms = {{step_matrix(cfg, 1), 0.5, 1}, {step_matrix(cfg, -1), 0.5, 1}};
  mu.max_word_length = 1;
  return mu;
}

std::uint64_t minimum_burnin(const DisorderConfig& cfg) {
  if (!(cfg.disorder() > 0)) throw Error("stationary measure needs lambda > 0");
  return static_cast<std::uint64_t>(std::ceil(10.0 / analytic_lyapunov(cfg)));
}

EmpiricalMeasure sample_stationary(const DisorderConfig& cfg, std::uint64_t burnin,
                                   std::uint64_t count, std::uint64_t seed, Direction theta0) {
  if (burnin < minimum_burnin(cfg)) {
    throw Error("burn-in too short: need at least " + std::to_string(minimum_burnin(cfg)) +
                " steps");
  }
  if (count < 1000) throw Error("sample_stationary: need M >= 1000");
  const double dp = cfg.diagonal(1), dm = cfg.diagonal(-1);
  const auto [x0, y0] = theta0.unit();
  std::vector<double> angles(count);
  parallel_for(count, [&](std::size_t i) {
    SignStream signs(seed, i);
    double x = x0, y = y0;
    for (std::uint64_t n = 0; n < burnin; ++n) {
      const double e = signs.next() > 0 ? dp : dm;
      const double nx = e * x - y;
      y = x;
      x = nx;
      if ((n & 31u) == 31u) {
        const double s = std::max(std::abs(x), std::abs(y));
        x /= s;
        y /= s;
      }
    }
    angles[i] = Direction::of_vector(x, y).angle();
  });
  auto m = EmpiricalMeasure::from_angles(std::move(angles));
  m.cfg = cfg;
  m.burnin = burnin;
  m.seed = seed;
  return m;
}

std::vector<std::complex<double>> fourier_coefficients(const EmpiricalMeasure& m, int k_max) {
  std::vector<std::vector<double>> re(k_max, std::vector<double>(m.count()));
  auto im = re;
  parallel_for(m.count(), [&](std::size_t i) {
    const double t = m.samples[i];
    const std::complex<double> z{std::cos(2 * t), std::sin(2 * t)};
    std::complex<double> zk = 1.0;
    for (int k = 0; k < k_max; ++k) {
      zk *= z;
      re[k][i] = zk.real();
      im[k][i] = zk.imag();
    }
  });
  std::vector<std::complex<double>> out;
  const double n = static_cast<double>(m.count());
  for (int k = 0; k < k_max; ++k) out.emplace_back(pairwise_sum(re[k]) / n, pairwise_sum(im[k]) / n);
  return out;
}

double stationarity_residual(const EmpiricalMeasure& m, const DiscreteSl2Measure& mu) {
  return stationarity_core(m, [&](std::size_t, double c, double s, auto& acc) {
    for (const auto& atom : mu.atoms) {
      const auto [u, v] = atom.g.mat().apply(c, s);
      accumulate_powers(doubled_phase(u, v), atom.weight, acc);
    }
  });
}

double stationarity_residual(const EmpiricalMeasure& m, const DisorderConfig& cfg) {
  return stationarity_residual(m, DiscreteSl2Measure::bernoulli(cfg));
}

IntervalMassProfile max_interval_mass(const EmpiricalMeasure& m, std::span<const double> radii) {
  IntervalMassProfile p;
  const auto x2 = doubled(m.samples);
  for (double r : radii) {
    p.radii.push_back(r);
    p.masses.push_back(max_closed_arc(m.samples, x2, r));
  }
  return p;
}

DimensionEstimate correlation_dimension(const EmpiricalMeasure& m, DimensionOptions opts) {
  const std::size_t n = m.count();
  if (n < 2) throw Error("correlation_dimension: need at least two samples");
  double low = opts.scale_low;
  if (low <= 0) low = std::exp2(std::ceil(std::log2(2 * kPi / static_cast<double>(n))));
  const double high = opts.scale_high;
  if (low < 2 * kPi / static_cast<double>(n) * (1 - 1e-12) || high > 0.1 || low >= high) {
    throw Error("correlation_dimension: scale range must lie within [2 pi / M, 0.1]");
  }
  std::vector<double> radii;
  for (double r = low; r <= high * (1 + 1e-12); r *= 2) radii.push_back(r);
  if (radii.size() < 3) throw Error("correlation_dimension: need at least 3 dyadic scales");
  const std::size_t k = radii.size();

  const auto& x = m.samples;
  const auto x2 = doubled(x);
  // end[s * n + i]: one past the last forward neighbour of i within radii[s].
  std::vector<std::uint32_t> end(k * n);
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      j = std::max(j, i + 1);
      while (j < i + n && x2[j] - x[i] < radii[s]) ++j;
      end[s * n + i] = static_cast<std::uint32_t>(j);
    }
  }

  std::vector<double> log_r(k);
  for (std::size_t s = 0; s < k; ++s) log_r[s] = std::log(radii[s]);

  // Weighted pair counts: sum_i w_i (W[end] - W[i+1]) over the doubled array.
  auto slope_for = [&](const std::vector<double>* weights, double* residual) {
    std::vector<double> prefix(2 * n + 1, 0.0);
    for (std::size_t j = 0; j < 2 * n; ++j) {
      prefix[j + 1] = prefix[j] + (weights ? (*weights)[j % n] : 1.0);
    }
    std::vector<double> log_c(k);
    for (std::size_t s = 0; s < k; ++s) {
      std::vector<double> terms(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double wi = weights ? (*weights)[i] : 1.0;
        terms[i] = wi * (prefix[end[s * n + i]] - prefix[i + 1]);
      }
      const double c = pairwise_sum(terms);
      if (!(c > 0)) throw Error("measure degenerate at these scales");
      log_c[s] = std::log(c);
    }
    const auto fit = linear_fit(log_r, log_c);
    if (residual) *residual = fit.residual;
    return fit.slope;
  };

  DimensionEstimate est;
  est.value = slope_for(nullptr, &est.residual);
  est.scale_low = radii.front();
  est.scale_high = radii.back();
  est.scales_used = static_cast<int>(k);

  if (opts.bootstrap > 0) {
    std::vector<double> slopes(opts.bootstrap);
    const std::uint64_t boot_seed = derive_seed(opts.seed, 0xB007);
    parallel_for(opts.bootstrap, [&](std::size_t b) {
      CounterRng rng(boot_seed, b);
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) w[rng.below(n)] += 1.0;
      try {
        slopes[b] = slope_for(&w, nullptr);
      } catch (const Error&) {
        slopes[b] = std::numeric_limits<double>::quiet_NaN();
      }
    });
    std::erase_if(slopes, [](double v) { return std::isnan(v); });
    if (slopes.empty()) throw Error("measure degenerate at these scales");
    est.ci_low = std::min(quantile(slopes, 0.05), est.value);
    est.ci_high = std::max(quantile(slopes, 0.95), est.value);
  } else {
    est.ci_low = est.ci_high = est.value;
  }
  return est;
}

DiscreteSl2Measure renormalize_support(const DisorderConfig& cfg, double threshold,
                                       RenormOptions opts) {
  if (!(threshold > 0) || !std::isfinite(threshold)) {
    throw Error("renormalize_support: threshold must be positive");
  }
  const Sl2 gp = step_matrix(cfg, 1), gm = step_matrix(cfg, -1);
  DiscreteSl2Measure out;
  std::vector<DiscreteSl2Measure::Atom> stack{{gm, 0.5, 1}, {gp, 0.5, 1}};
  while (!stack.empty()) {
    auto atom = stack.back();
    stack.pop_back();
    const bool stop_norm = atom.g.norm() >= threshold;
    const bool stop_depth = opts.max_depth > 0 && atom.word_length >= opts.max_depth;
    if (stop_norm || stop_depth) {
      if (!stop_norm) out.unresolved_weight += atom.weight;
      out.max_word_length = std::max(out.max_word_length, atom.word_length);
      out.atoms.push_back(atom);
      continue;
    }
    if (out.atoms.size() + stack.size() + 2 > opts.max_atoms) {
      throw Error("renormalization did not terminate at this T");
    }
    const double w = atom.weight / 2;
    stack.push_back({compose(atom.g, gm), w, atom.word_length + 1});
    stack.push_back({compose(atom.g, gp), w, atom.word_length + 1});
  }
  return out;
}

std::pair<Sl2, int> sample_stopped_word(const DisorderConfig& cfg, double threshold,
                                        CounterRng& rng, int max_length) {
  const Mat2 gp = step_matrix(cfg, 1).mat(), gm = step_matrix(cfg, -1).mat();
  std::uint64_t bits = 0;
  int left = 0;
  auto draw = [&]() -> const Mat2& {
    if (left == 0) {
      bits = rng.next_u64();
      left = 64;
    }
    --left;
    const bool plus = bits & 1u;
    bits >>= 1;
    return plus ? gp : gm;
  };
  Mat2 g = draw();
  int length = 1;
  while (op_norm(g) < threshold && length < max_length) {
    g = g * draw();
    ++length;
  }
  return {Sl2(g), length};
}

double stopped_stationarity_residual(const EmpiricalMeasure& m, const DisorderConfig& cfg,
                                     double threshold, std::uint64_t seed, int draws) {
  if (draws < 1) throw Error("stopped_stationarity_residual: draws must be >= 1");
  const std::uint64_t stream_seed = derive_seed(seed, 0x5709);
  return stationarity_core(m, [&](std::size_t i, double c, double s, auto& acc) {
    CounterRng rng(stream_seed, i);
    for (int d = 0; d < draws; ++d) {
      const auto [g, len] = sample_stopped_word(cfg, threshold, rng);
      const auto [u, v] = g.mat().apply(c, s);
      accumulate_powers(doubled_phase(u, v), 1.0 / draws, acc);
    }
  });
}

bool Arc::contains(double angle) const {
  if (length >= kPi) return true;
  return Direction::reduce(angle - start) < length;
}

EigenDirections eigen_directions(const DisorderConfig& cfg, std::uint64_t n_steps,
                                 std::uint64_t realizations, std::uint64_t seed) {
  std::vector<double> plus(realizations), minus(realizations);
  std::vector<std::uint8_t> ok(realizations, 0);
  parallel_for(realizations, [&](std::size_t r) {
    const auto p = product_streamed(cfg, n_steps, seed, r);
    try {
      const auto split = eigen_split_scaled(p.matrix(), p.log_scale());
      plus[r] = split.expanding.angle();
      minus[r] = split.contracting.angle();
      ok[r] = 1;
    } catch (const Error&) {
    }
  });
  EigenDirections out;
  for (std::size_t r = 0; r < realizations; ++r) {
    if (ok[r]) {
      out.expanding.push_back(plus[r]);
      out.contracting.push_back(minus[r]);
    } else {
      ++out.non_hyperbolic;
    }
  }
  return out;
}

ArcMassResult direction_arc_mass(const DisorderConfig& cfg, std::uint64_t n_steps, Arc plus,
                                 Arc minus, std::uint64_t realizations, std::uint64_t seed) {
  const auto dirs = eigen_directions(cfg, n_steps, realizations, seed);
  ArcMassResult r;
  r.hyperbolic = dirs.expanding.size();
  r.non_hyperbolic = dirs.non_hyperbolic;
  if (r.hyperbolic == 0) return r;
  std::uint64_t e = 0, c = 0, j = 0;
  for (std::size_t i = 0; i < dirs.expanding.size(); ++i) {
    const bool in_e = plus.contains(dirs.expanding[i]);
    const bool in_c = minus.contains(dirs.contracting[i]);
    e += in_e;
    c += in_c;
    j += in_e && in_c;
  }
  const double h = static_cast<double>(r.hyperbolic);
  r.expanding = static_cast<double>(e) / h;
  r.contracting = static_cast<double>(c) / h;
  r.joint = static_cast<double>(j) / h;
  return r;
}

ArcSweep arc_exponent_sweep(const DisorderConfig& cfg, std::uint64_t n_steps,
                            std::uint64_t realizations, std::uint64_t seed,
                            std::span<const double> etas) {
  if (etas.size() < 2) throw Error("arc sweep: need at least two arc lengths");
  auto dirs = eigen_directions(cfg, n_steps, realizations, seed);
  if (dirs.contracting.empty()) throw Error("arc sweep: no hyperbolic realization");
  std::sort(dirs.contracting.begin(), dirs.contracting.end());
  ArcSweep sweep;
  sweep.non_hyperbolic = dirs.non_hyperbolic;
  std::vector<double> lx, ly;
  for (double eta : etas) {
    const auto [t, count] = worst_circular_window(dirs.contracting, eta / 2);
    const double mass = static_cast<double>(count) / static_cast<double>(dirs.contracting.size());
    sweep.etas.push_back(eta);
    sweep.max_mass.push_back(mass);
    lx.push_back(std::log(eta));
    ly.push_back(std::log(mass));
  }
  const auto fit = linear_fit(lx, ly);
  sweep.exponent = fit.slope;
  sweep.residual = fit.residual;
  return sweep;
}

MultiscaleReport multiscale_diagnostic(const EmpiricalMeasure& m, double disorder, Arc interval,
                                       MultiscaleOptions opts) {
  if (!(disorder > 0)) throw Error("multiscale_diagnostic: lambda must be positive");
  if (!(interval.length > 0) || interval.length > disorder) {
    throw Error("multiscale_diagnostic: need 0 < |I| <= lambda");
  }
  const auto x2 = doubled(m.samples);
  MultiscaleReport r;
  r.mass = m.mass(interval.start, interval.length);
  r.near_term =
      max_closed_arc(m.samples, x2, std::pow(disorder, opts.near_exponent) * interval.length);
  const double d_low = std::pow(disorder, -opts.d_low_exponent);
  const double d_high = std::pow(disorder, -opts.d_high_exponent);
  std::vector<double> grid;
  for (double d = d_low; d < d_high; d *= 2) grid.push_back(d);
  grid.push_back(d_high);
  for (double d : grid) {
    const double term = max_closed_arc(m.samples, x2, d * interval.length) / d;
    if (term > r.far_term) {
      r.far_term = term;
      r.best_d = d;
    }
  }
  r.ratio = r.mass > 0 ? r.mass / (r.near_term + r.far_term) : 0.0;
  return r;
}

}  // namespace ablab
