// SPDX-License-Identifier: Apache-2.0
#include "ablab/cocycle.hpp"

#include <numbers>

#include "ablab/error.hpp"
#include "ablab/rng.hpp"

namespace ablab {

DisorderConfig::DisorderConfig(double energy, double disorder, double delta0)
    : energy_(energy), disorder_(disorder), delta0_(delta0) {
  if (!(delta0 >= 0 && delta0 < 1)) throw Error("delta0 must lie in [0, 1)");
  if (!(std::abs(energy) > delta0 && std::abs(energy) < 2 - delta0)) {
    throw Error("energy must satisfy delta0 < |E| < 2 - delta0");
  }
  if (!(disorder >= 0) || !std::isfinite(disorder)) throw Error("disorder must be >= 0");
}

BernoulliWord BernoulliWord::concat(const BernoulliWord& tail) const {
  BernoulliWord out = *this;
  out.signs.insert(out.signs.end(), tail.signs.begin(), tail.signs.end());
  return out;
}

Sl2 step_matrix(const DisorderConfig& cfg, int sign) {
  if (sign != 1 && sign != -1) throw Error("sign must be +1 or -1");
  return Sl2(cfg.diagonal(sign), -1.0, 1.0, 0.0);
}

BernoulliWord sample_word(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw Error("sample_word: n must be >= 1");
  BernoulliWord w;
  w.seed = seed;
  w.stream = stream;
  w.signs.resize(n);
  SignStream signs(seed, stream);
  for (auto& s : w.signs) s = static_cast<std::int8_t>(signs.next());
  return w;
}

void ScaledProduct::rescale() {
  int exponent = 0;
  std::frexp(std::max(std::abs(m_.a), std::abs(m_.b)), &exponent);
  m_.a = std::ldexp(m_.a, -exponent);
  m_.b = std::ldexp(m_.b, -exponent);
  m_.c = std::ldexp(m_.c, -exponent);
  m_.d = std::ldexp(m_.d, -exponent);
  log_scale_ += exponent * std::numbers::ln2;
}

Sl2 CocycleTrace::matrix() const {
  if (log_norm > 700) throw Error("norm overflow; use propagate with log-scaling");
  const Mat2 m = normalized_matrix.scaled(std::exp(log_norm));
  // Beyond |M|^2 ~ 1/eps the normalized entries no longer carry det M = 1.
  if (!(std::abs(m.det() - 1) <= 1e-6)) {
    throw Error("matrix: norm too large for an exact SL(2) form; use normalized_matrix");
  }
  return Sl2(m);
}

CocycleTrace propagate(const DisorderConfig& cfg, const BernoulliWord& word, Direction theta0,
                       std::array<double, 2> u0, PropagateOptions opts) {
  if (word.signs.empty()) throw Error("propagate: empty word");
  const bool store = opts.store_orbit.value_or(word.size() <= 1'000'000);
  const double diag_plus = cfg.diagonal(1), diag_minus = cfg.diagonal(-1);

  CocycleTrace out;
  if (store) {
    out.orbit.reserve(word.size() + 1);
    out.orbit.push_back(theta0);
  }

  ScaledProduct product;
  // Orbit vector and growth vector evolve under the same steps; both are
  // renormalized lazily to stay in range.
  auto [ox, oy] = theta0.unit();
  double vx = u0[0], vy = u0[1];
  double vlog = 0.0;
  for (const auto s : word.signs) {
    const double diag = s > 0 ? diag_plus : diag_minus;
    product.push(diag);

    const double nvx = diag * vx - vy;
    vy = vx;
    vx = nvx;
    if (std::abs(vx) > ScaledProduct::kRescaleAbove) {
      int e = 0;
      std::frexp(std::abs(vx), &e);
      vx = std::ldexp(vx, -e);
      vy = std::ldexp(vy, -e);
      vlog += e * std::numbers::ln2;
    }

    if (store) {
      const double nox = diag * ox - oy;
      oy = ox;
      ox = nox;
      const double r = std::hypot(ox, oy);
      ox /= r;
      oy /= r;
      out.orbit.push_back(Direction::of_vector(ox, oy));
    }
  }

  out.log_norm = product.log_norm();
  out.normalized_matrix = product.matrix().scaled(1.0 / op_norm(product.matrix()));
  out.log_vector_growth = vlog + std::log(std::hypot(vx, vy)) - std::log(std::hypot(u0[0], u0[1]));
  return out;
}

double growth_ratio(const DisorderConfig& cfg, const BernoulliWord& word,
                    std::array<double, 2> u) {
  const auto trace = propagate(cfg, word, Direction{}, u, {.store_orbit = false});
  const auto [x, y] = trace.normalized_matrix.apply(u[0], u[1]);
  return -std::log(std::hypot(x, y) / std::hypot(u[0], u[1]));
}

ScaledProduct product_streamed(const DisorderConfig& cfg, std::uint64_t n, std::uint64_t seed,
                               std::uint64_t stream) {
  const double diag_plus = cfg.diagonal(1), diag_minus = cfg.diagonal(-1);
  CounterRng rng(seed, stream);
  ScaledProduct product;
  std::uint64_t done = 0;
  while (done < n) {
    std::uint64_t bits = rng.next_u64();
    const std::uint64_t chunk = std::min<std::uint64_t>(64, n - done);
    for (std::uint64_t k = 0; k < chunk; ++k) {
      product.push((bits & 1u) ? diag_plus : diag_minus);
      bits >>= 1;
    }
    done += chunk;
  }
  return product;
}

double log_norm_streamed(const DisorderConfig& cfg, std::uint64_t n, std::uint64_t seed,
                         std::uint64_t stream) {
  return product_streamed(cfg, n, seed, stream).log_norm();
}

}  // namespace ablab
