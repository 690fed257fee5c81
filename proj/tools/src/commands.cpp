// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "ablab/cocycle.hpp"
#include "ablab/cube.hpp"
#include "ablab/density_of_states.hpp"
#include "ablab/furstenberg.hpp"
#include "ablab/green.hpp"
#include "ablab/parallel.hpp"
#include "ablab/pastur.hpp"
#include "ablab/stats.hpp"
#include "config_file.hpp"

namespace ablab::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Model {
  double energy = 1.0;
  double disorder = 0.1;

  DisorderConfig config() const {
    try {
      return DisorderConfig(energy, disorder);
    } catch (const Error& e) {
      throw UsageError(std::string("--E/--lambda: ") + e.what());
    }
  }
};

void add_model(CLI::App* sub, Model& m, double energy, double disorder) {
  m.energy = energy;
  m.disorder = disorder;
  sub->add_option("--E", m.energy, "Energy, delta0 < |E| < 2 - delta0");
  sub->add_option("--lambda", m.disorder, "Disorder strength")->check(CLI::NonNegativeNumber);
}

std::string option_value(const CLI::Option* opt) {
  if (opt->get_type_size() == 0) return opt->count() > 0 ? "true" : "false";
  if (opt->count() == 0) return opt->get_default_str();
  const auto& res = opt->results();
  return res.empty() ? std::string{} : res.back();
}

std::vector<std::pair<std::string, std::string>> config_echo(const CLI::App* sub) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    out.emplace_back(name, option_value(opt));
  }
  return out;
}

template <class T>
T require_at_least(T value, T minimum, const char* field) {
  if (value < minimum) {
    std::ostringstream os;
    os << field << ": must be at least " << minimum;
    throw UsageError(os.str());
  }
  return value;
}

Status worse(Status a, Status b) { return std::max(a, b); }

double tolerance_stationarity(std::size_t m) {
  return kStationarityTolerance / std::sqrt(static_cast<double>(m));
}

GreenMethod parse_method(const std::string& s) {
  if (s == "ratio") return GreenMethod::kTransferRatio;
  if (s == "box") return GreenMethod::kBoxInversion;
  throw UsageError("--method: expected ratio or box");
}

// ---------------------------------------------------------------- cocycle

void add_lyapunov(CLI::App& app, std::vector<std::unique_ptr<Command>>& cmds) {
  struct Opts {
    Model model;
    std::uint64_t steps = 1'000'000;
    std::uint64_t realizations = 64;
    double rel_tol = 0.2;
  };
  auto o = std::make_shared<Opts>();
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand("lyapunov", "Monte Carlo Lyapunov exponent against the weak disorder formula");
  add_model(sub, o->model, 1.0, 0.1);
  sub->add_option("--steps", o->steps, "Product length N");
  sub->add_option("--realizations", o->realizations, "Independent words R");
  sub->add_option("--rel-tol", o->rel_tol, "Relative tolerance against the analytic value");
  cmd->run = [o, c = cmd.get()] {
    const auto cfg = o->model.config();
    require_at_least<std::uint64_t>(o->steps, 1000, "--steps");
    require_at_least<std::uint64_t>(o->realizations, 2, "--realizations");
    const auto samples = lyapunov_samples(cfg, o->steps, o->realizations, c->common.seed);
    const auto est = mean_stderr(samples);
    const double analytic = analytic_lyapunov(cfg);
    Report r;
    Table t{"lyapunov", {"realization", "log_norm_per_step"}, {}};
    for (std::size_t i = 0; i < samples.size(); ++i) {
      t.add({static_cast<std::uint64_t>(i), samples[i]});
    }
    r.tables.push_back(std::move(t));
    r.metrics = {{"mean", est.mean},
                 {"std_error", est.std_error},
                 {"analytic", analytic},
                 {"ratio", est.mean / analytic}};
    const double tol = std::max(o->rel_tol * analytic, 3 * est.std_error);
    r.check("analytic_agreement", std::abs(est.mean - analytic) <= tol, Status::kWarn,
            std::abs(est.mean - analytic), tol, "|mean - analytic| <= max(rel_tol*analytic, 3 stderr)");
    return r;
  };
  cmd->app = sub;
  cmd->id = "lyapunov";
  cmds.push_back(std::move(cmd));
}

void add_deviation(CLI::App& app, std::vector<std::unique_ptr<Command>>& cmds) {
  struct Opts {
    Model model;
    std::uint64_t steps = 50'000;
    std::string a = "0.5,1,1.5,2";
    std::uint64_t realizations = 10'000;
  };
  auto o = std::make_shared<Opts>();
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand("deviation", "Large deviation tails of log|M_N|/N");
  add_model(sub, o->model, 1.0, 0.2);
  sub->add_option("--steps", o->steps, "Product length N");
  sub->add_option("--a", o->a, "Comma separated relative thresholds a");
  sub->add_option("--realizations", o->realizations, "Independent words R");
  cmd->run = [o, c = cmd.get()] {
    const auto cfg = o->model.config();
    require_at_least<std::uint64_t>(o->realizations, 1000, "--realizations");
    auto a = parse_list(o->a, "--a");
    std::sort(a.begin(), a.end());
    if (a.empty() || a.front() < 0) throw UsageError("--a: need nonnegative values");
    const auto tails = deviation_tails(cfg, o->steps, a, o->realizations, c->common.seed);
    Report r;
    Table t{"deviation", {"a", "probability", "bound", "allowed"}, {}};
    const double floor = 5.0 / static_cast<double>(o->realizations);
    bool bounded = true, monotone = true;
    double worst = 0;
    for (std::size_t i = 0; i < tails.size(); ++i) {
      const double allowed = std::max(3 * tails[i].bound, floor);
      t.add({tails[i].a, tails[i].probability, tails[i].bound, allowed});
      bounded = bounded && tails[i].probability <= allowed;
      worst = std::max(worst, tails[i].probability / allowed);
      if (i > 0 && tails[i].probability > tails[i - 1].probability) monotone = false;
    }
    r.tables.push_back(std::move(t));
    r.metrics = {{"analytic_lyapunov", analytic_lyapunov(cfg)}};
    r.check("tail_bound", bounded, Status::kFail, worst, 1.0,
            "probability <= max(3 exp(-(a^2/2) L N), 5/R) at every a");
    r.check("tail_monotone", monotone, Status::kFail, 0, 0, "nonincreasing in a");
    return r;
  };
  cmd->app = sub;
  cmd->id = "deviation";
  cmds.push_back(std::move(cmd));
}

void add_pastur(CLI::App& app, std::vector<std::unique_ptr<Command>>& cmds) {
  struct Opts {
    Model model;
    std::uint64_t steps = 100'000;
    std::uint64_t realizations = 16;
  };
  auto o = std::make_shared<Opts>();
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand("pastur", "Phase-recursion growth against the direct product");
  add_model(sub, o->model, 1.0, 0.1);
  sub->add_option("--steps", o->steps, "Product length N");
  sub->add_option("--realizations", o->realizations, "Independent words R");
  cmd->run = [o, c = cmd.get()] {
    const auto cfg = o->model.config();
    require_at_least<std::uint64_t>(o->steps, 1, "--steps");
    require_at_least<std::uint64_t>(o->realizations, 1, "--realizations");
    std::vector<double> phase(o->realizations), direct(o->realizations);
    parallel_for(o->realizations, [&](std::size_t i) {
      const auto word = sample_word(o->steps, c->common.seed, i);
      phase[i] = fp_lognorm(cfg, word);
      PropagateOptions po;
      po.store_orbit = false;
      direct[i] = propagate(cfg, word, Direction(0.0), matched_initial_vector(), po)
                      .log_vector_growth / static_cast<double>(o->steps);
    });
    Report r;
    Table t{"pastur", {"realization", "phase_sum", "direct_growth", "difference"}, {}};
    double worst = 0;
    for (std::size_t i = 0; i < phase.size(); ++i) {
      t.add({static_cast<std::uint64_t>(i), phase[i], direct[i], phase[i] - direct[i]});
      worst = std::max(worst, std::abs(phase[i] - direct[i]));
    }
    r.tables.push_back(std::move(t));
    const auto mp = mean_stderr(phase);
    r.metrics = {{"phase_mean", mp.mean},
                 {"phase_std_error", mp.std_error},
                 {"direct_mean", mean_stderr(direct).mean},
                 {"analytic", analytic_lyapunov(cfg)}};
    const double tol = 10.0 / static_cast<double>(o->steps);
    r.check("phase_matches_product", worst <= tol, Status::kWarn, worst, tol,
            "|phase sum - log|M_N u|/N| <= 10/N");
    return r;
  };
  cmd->app = sub;
  cmd->id = "pastur";
  cmds.push_back(std::move(cmd));
}

// ---------------------------------------------------------- furstenberg

struct SampleOpts {
  Model model;
  std::uint64_t burnin = 0;
  std::uint64_t count = 10'000;
  double theta0 = 0;
};

void add_sample_options(CLI::App* sub, SampleOpts& s, double disorder, std::uint64_t count) {
  add_model(sub, s.model, 1.0, disorder);
  s.count = count;
  sub->add_option("--burnin", s.burnin, "Burn-in steps (0: 10 / analytic exponent)");
  sub->add_option("--count", s.count, "Number of independent samples M");
  sub->add_option("--theta0", s.theta0, "Initial direction");
}

EmpiricalMeasure draw_sample(const SampleOpts& s, std::uint64_t seed) {
  const auto cfg = s.model.config();
  if (!(cfg.disorder() > 0)) throw UsageError("--lambda: the stationary measure needs lambda > 0");
  const auto burnin = s.burnin == 0 ? minimum_burnin(cfg) : s.burnin;
  if (burnin < minimum_burnin(cfg)) {
    throw UsageError("--burnin: must be at least " + std::to_string(minimum_burnin(cfg)));
  }
  require_at_least<std::uint64_t>(s.count, 1000, "--count");
  return sample_stationary(cfg, burnin, s.count, seed, Direction(s.theta0));
}

void add_furstenberg(CLI::App& app, std::vector<std::unique_ptr<Command>>& cmds) {
  auto* group = app.add_subcommand("furstenberg", "Stationary measure on the projective line");
  group->require_subcommand(1);

  {
    auto o = std::make_shared<SampleOpts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("sample", "Draw M samples of the stationary measure");
    add_sample_options(sub, *o, 0.5, 10'000);
    cmd->run = [o, c = cmd.get()] {
      const auto m = draw_sample(*o, c->common.seed);
      Report r;
      Table t{"samples", {"index", "angle"}, {}};
      for (std::size_t i = 0; i < m.count(); ++i) t.add({static_cast<std::uint64_t>(i), m.samples[i]});
      r.tables.push_back(std::move(t));
      const auto f = fourier_coefficients(m, 3);
      r.metrics = {{"burnin", m.burnin}};
      for (int k = 0; k < 3; ++k) {
        r.metrics["fourier_" + std::to_string(k + 1)] = {f[k].real(), f[k].imag()};
      }
      return r;
    };
    cmd->app = sub;
    cmd->id = "furstenberg sample";
    cmds.push_back(std::move(cmd));
  }
  {
    auto o = std::make_shared<SampleOpts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("stationarity", "Stationarity residual of sampled measure");
    add_sample_options(sub, *o, 0.5, 10'000);
    cmd->run = [o, c = cmd.get()] {
      const auto m = draw_sample(*o, c->common.seed);
      const double res = stationarity_residual(m, *m.cfg);
      const double tol = tolerance_stationarity(m.count());
      Report r;
      Table t{"stationarity", {"count", "burnin", "residual", "tolerance"}, {}};
      t.add({static_cast<std::uint64_t>(m.count()), m.burnin, res, tol});
      r.tables.push_back(std::move(t));
      r.metrics = {{"residual", res}, {"residual_sqrt_m", res * std::sqrt(double(m.count()))}};
      r.check("stationarity", res <= tol, Status::kFail, res, tol, "residual <= 5/sqrt(M)");
      return r;
    };
    cmd->app = sub;
    cmd->id = "furstenberg stationarity";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      SampleOpts sample;
      double scale_low = 0;
      double scale_high = 0.0625;
      int bootstrap = 200;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("dimension", "Correlation dimension with bootstrap interval");
    add_sample_options(sub, o->sample, 0.5, 100'000);
    sub->add_option("--scale-low", o->scale_low, "Smallest radius (0: smallest power of two >= 2 pi/M)");
    sub->add_option("--scale-high", o->scale_high, "Largest radius (<= 0.1)");
    sub->add_option("--bootstrap", o->bootstrap, "Bootstrap replicates");
    cmd->run = [o, c = cmd.get()] {
      const auto m = draw_sample(o->sample, c->common.seed);
      DimensionOptions d;
      d.scale_low = o->scale_low;
      d.scale_high = o->scale_high;
      d.bootstrap = o->bootstrap;
      d.seed = c->common.seed;
      DimensionEstimate est;
      try {
        est = correlation_dimension(m, d);
      } catch (const Error& e) {
        if (std::string(e.what()).find("scale range") != std::string::npos) throw UsageError(e.what());
        throw;
      }
      Report r;
      Table t{"dimension",
              {"value", "ci_low", "ci_high", "scale_low", "scale_high", "scales", "residual"},
              {}};
      t.add({est.value, est.ci_low, est.ci_high, est.scale_low, est.scale_high,
             static_cast<std::int64_t>(est.scales_used), est.residual});
      r.tables.push_back(std::move(t));
      r.metrics = {{"value", est.value}, {"ci_low", est.ci_low}, {"ci_high", est.ci_high}};
      r.check("dimension_at_most_one", est.value <= 1.05, Status::kWarn, est.value, 1.05);
      return r;
    };
    cmd->app = sub;
    cmd->id = "furstenberg dimension";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      SampleOpts sample;
      double threshold = 4.0;
      int max_depth = 12;
      std::uint64_t max_atoms = 1'000'000;
      int draws = 16;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("renorm", "Stopping-time renormalization of the step distribution");
    add_sample_options(sub, o->sample, 0.5, 10'000);
    sub->add_option("--threshold", o->threshold, "Norm threshold T")->check(CLI::PositiveNumber);
    sub->add_option("--max-depth", o->max_depth, "Word length cap (0: none)");
    sub->add_option("--max-atoms", o->max_atoms, "Atom cap");
    sub->add_option("--draws", o->draws, "Stopped words per sample for the Monte Carlo check");
    cmd->run = [o, c = cmd.get()] {
      const auto cfg = o->sample.model.config();
      RenormOptions ro;
      ro.max_depth = o->max_depth;
      ro.max_atoms = o->max_atoms;
      const auto mu = renormalize_support(cfg, o->threshold, ro);
      const auto m = draw_sample(o->sample, c->common.seed);
      const double tol = tolerance_stationarity(m.count());
      const double exact = stationarity_residual(m, mu);
      const double stopped =
          stopped_stationarity_residual(m, cfg, o->threshold, c->common.seed, o->draws);
      const double total = mu.total_weight();
      Report r;
      Table t{"atoms", {"index", "a", "b", "c", "d", "weight", "word_length", "norm"}, {}};
      for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const auto& a = mu.atoms[i];
        t.add({static_cast<std::uint64_t>(i), a.g.a(), a.g.b(), a.g.c(), a.g.d(), a.weight,
               static_cast<std::int64_t>(a.word_length), a.g.norm()});
      }
      r.tables.push_back(std::move(t));
      r.metrics = {{"atoms", mu.atoms.size()},
                   {"max_word_length", mu.max_word_length},
                   {"total_weight", total},
                   {"unresolved_weight", mu.unresolved_weight},
                   {"residual_atoms", exact},
                   {"residual_stopped", stopped}};
      r.check("total_mass", total == 1.0, Status::kFail, total, 1.0, "weights sum to 1 exactly");
      r.check("stationarity_atoms", exact <= tol, Status::kFail, exact, tol, "residual <= 5/sqrt(M)");
      r.check("stationarity_stopped", stopped <= tol, Status::kFail, stopped, tol,
              "residual <= 5/sqrt(M)");
      return r;
    };
    cmd->app = sub;
    cmd->id = "furstenberg renorm";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      Model model;
      std::uint64_t steps = 10'000;
      std::uint64_t realizations = 10'000;
      std::string etas = "0.01,0.02,0.04,0.08,0.16,0.32";
      double arc_start = 0;
      double arc_length = kPi / 2;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("arcs", "Eigendirection arc probabilities and arc-size sweep");
    add_model(sub, o->model, 1.0, 0.3);
    sub->add_option("--steps", o->steps, "Product length N");
    sub->add_option("--realizations", o->realizations, "Independent words R");
    sub->add_option("--etas", o->etas, "Comma separated arc lengths for the sweep");
    sub->add_option("--arc-start", o->arc_start, "Start of the arc used for v+ and v-");
    sub->add_option("--arc-length", o->arc_length, "Length of that arc");
    cmd->run = [o, c = cmd.get()] {
      const auto cfg = o->model.config();
      require_at_least<std::uint64_t>(o->realizations, 1, "--realizations");
      const auto etas = parse_list(o->etas, "--etas");
      const auto sweep = arc_exponent_sweep(cfg, o->steps, o->realizations, c->common.seed, etas);
      const Arc arc{o->arc_start, o->arc_length};
      const auto p = direction_arc_mass(cfg, o->steps, arc, arc, o->realizations, c->common.seed);
      Report r;
      Table t{"arcs", {"eta", "max_mass"}, {}};
      for (std::size_t i = 0; i < sweep.etas.size(); ++i) t.add({sweep.etas[i], sweep.max_mass[i]});
      r.tables.push_back(std::move(t));
      r.metrics = {{"exponent", sweep.exponent},
                   {"residual", sweep.residual},
                   {"p_expanding", p.expanding},
                   {"p_contracting", p.contracting},
                   {"p_joint", p.joint},
                   {"hyperbolic", p.hyperbolic},
                   {"non_hyperbolic", p.non_hyperbolic}};
      const double frac = static_cast<double>(p.non_hyperbolic) / static_cast<double>(o->realizations);
      r.check("hyperbolic_fraction", frac <= 0.01, Status::kWarn, frac, 0.01,
              "at most 1% non-hyperbolic realizations");
      r.check("arc_exponent_positive", sweep.exponent > 0, Status::kWarn, sweep.exponent, 0);
      return r;
    };
    cmd->app = sub;
    cmd->id = "furstenberg arcs";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      SampleOpts sample;
      std::uint64_t intervals = 100;
      double length = 0;
      double near_exponent = 0.1;
      double d_low_exponent = 0.1;
      double d_high_exponent = 0.2;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("multiscale", "Two-scale interval mass diagnostic");
    add_sample_options(sub, o->sample, 0.3, 100'000);
    sub->add_option("--intervals", o->intervals, "Number of random intervals");
    sub->add_option("--length", o->length, "Interval length (0: uniform in (0, lambda])");
    sub->add_option("--near-exponent", o->near_exponent, "a in the inner radius lambda^a |I|");
    sub->add_option("--d-low-exponent", o->d_low_exponent, "D grid starts at lambda^-a");
    sub->add_option("--d-high-exponent", o->d_high_exponent, "D grid ends at lambda^-b");
    cmd->run = [o, c = cmd.get()] {
      const auto m = draw_sample(o->sample, c->common.seed);
      const double lambda = o->sample.model.disorder;
      if (o->length > lambda) throw UsageError("--length: must not exceed lambda");
      MultiscaleOptions mo{o->near_exponent, o->d_low_exponent, o->d_high_exponent};
      CounterRng rng(derive_seed(c->common.seed, 0x1A7E), 0);
      Report r;
      Table t{"multiscale", {"start", "length", "mass", "near", "far", "best_d", "ratio"}, {}};
      bool finite = true;
      double worst = 0;
      for (std::uint64_t i = 0; i < o->intervals; ++i) {
        const double start = kPi * rng.uniform();
        const double len = o->length > 0 ? o->length : lambda * (1.0 - rng.uniform());
        const auto rep = multiscale_diagnostic(m, lambda, Arc{start, len}, mo);
        t.add({start, len, rep.mass, rep.near_term, rep.far_term, rep.best_d, rep.ratio});
        finite = finite && std::isfinite(rep.ratio);
        worst = std::max(worst, rep.ratio);
      }
      r.tables.push_back(std::move(t));
      r.metrics = {{"max_ratio", worst}};
      r.check("ratios_finite", finite, Status::kFail, worst, 0);
      return r;
    };
    cmd->app = sub;
    cmd->id = "furstenberg multiscale";
    cmds.push_back(std::move(cmd));
  }
}

// ------------------------------------------------------------------- ids

void add_ids(CLI::App& app, std::vector<std::unique_ptr<Command>>& cmds) {
  auto* group = app.add_subcommand("ids", "Integrated density of states");
  group->require_subcommand(1);
  {
    struct Opts {
      double disorder = 0;
      double e_min = -2.5;
      double e_max = 2.5;
      double pitch = 0.05;
      std::size_t box = 5000;
      std::uint64_t realizations = 100;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("curve", "N(E) on an energy grid");
    sub->add_option("--lambda", o->disorder, "Disorder strength")->check(CLI::NonNegativeNumber);
    sub->add_option("--e-min", o->e_min, "First grid energy");
    sub->add_option("--e-max", o->e_max, "Last grid energy");
    sub->add_option("--pitch", o->pitch, "Grid pitch")->check(CLI::PositiveNumber);
    sub->add_option("--box", o->box, "Box size L");
    sub->add_option("--realizations", o->realizations, "Potentials R");
    cmd->run = [o, c = cmd.get()] {
      require_at_least<std::size_t>(o->box, 500, "--box");
      require_at_least<std::uint64_t>(o->realizations, 50, "--realizations");
      if (o->e_max < o->e_min) throw UsageError("--e-max: must not be below --e-min");
      const auto grid = uniform_grid(o->e_min, o->e_max, o->pitch);
      const auto curve = ids_curve(o->disorder, grid, o->box, o->realizations, c->common.seed);
      Report r;
      Table t{"ids", {"E", "N", "std_error", "free_N"}, {}};
      bool monotone = true, symmetric = true;
      double worst_sym = 0, worst_free = 0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        t.add({grid[i], curve.values[i], curve.std_errors[i], free_ids(grid[i])});
        worst_free = std::max(worst_free, std::abs(curve.values[i] - free_ids(grid[i])));
        if (i + 1 < grid.size() &&
            curve.values[i + 1] < curve.values[i] - 2 * (curve.std_errors[i] + curve.std_errors[i + 1])) {
          monotone = false;
        }
        for (std::size_t j = 0; j < grid.size(); ++j) {
          if (std::abs(grid[i] + grid[j]) > 1e-9) continue;
          const double dev = std::abs(curve.values[i] + curve.values[j] - 1.0);
          const double tol = 3 * std::hypot(curve.std_errors[i], curve.std_errors[j]) + 1e-12;
          worst_sym = std::max(worst_sym, dev / tol);
          if (dev > tol) symmetric = false;
        }
      }
      r.tables.push_back(std::move(t));
      r.metrics = {{"max_symmetry_ratio", worst_sym}, {"max_free_deviation", worst_free}};
      r.check("monotone", monotone, Status::kFail, 0, 0, "nondecreasing within 2 (se_i + se_i+1)");
      r.check("symmetry", symmetric, Status::kFail, worst_sym, 1.0, "N(E) + N(-E) = 1 within 3 stderr");
      if (o->disorder == 0) {
        r.check("free_ids", worst_free <= 2e-3, Status::kWarn, worst_free, 2e-3,
                "|N - (1 - arccos(E/2)/pi)| <= 2e-3");
      }
      return r;
    };
    cmd->app = sub;
    cmd->id = "ids curve";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      double disorder = 0.1;
      double center = 1.0;
      double half_window = 0.09375;
      double center_step = 0x1.0p-7;
      double pitch = 0x1.0p-9;
      double h_min = 0x1.0p-8;
      double h_max = 0x1.0p-4;
      std::size_t box = 5000;
      std::uint64_t realizations = 100;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("holder", "Hoelder exponent of N(E) on an energy window");
    sub->add_option("--lambda", o->disorder, "Disorder strength")->check(CLI::NonNegativeNumber);
    sub->add_option("--center", o->center, "Window center");
    sub->add_option("--half-window", o->half_window, "Centers range over center +- half-window");
    sub->add_option("--center-step", o->center_step, "Spacing of the centers");
    sub->add_option("--pitch", o->pitch, "Grid pitch")->check(CLI::PositiveNumber);
    sub->add_option("--h-min", o->h_min, "Smallest half-width h")->check(CLI::PositiveNumber);
    sub->add_option("--h-max", o->h_max, "Largest half-width h")->check(CLI::PositiveNumber);
    sub->add_option("--box", o->box, "Box size L");
    sub->add_option("--realizations", o->realizations, "Potentials R");
    cmd->run = [o, c = cmd.get()] {
      require_at_least<std::size_t>(o->box, 500, "--box");
      require_at_least<std::uint64_t>(o->realizations, 50, "--realizations");
      auto multiple = [&](double x) {
        const double k = x / o->pitch;
        return std::abs(k - std::round(k)) < 1e-9;
      };
      if (!multiple(o->center_step) || !multiple(o->h_min) || !multiple(o->half_window)) {
        throw UsageError("--pitch: center step, half window and h-min must be multiples of it");
      }
      const auto k = static_cast<long>(std::llround((o->half_window + o->h_max) / o->pitch)) + 1;
      std::vector<double> grid;
      for (long i = -k; i <= k; ++i) grid.push_back(o->center + static_cast<double>(i) * o->pitch);
      std::vector<double> centers;
      const auto kc = std::llround(o->half_window / o->center_step);
      for (long long j = -kc; j <= kc; ++j) centers.push_back(o->center + static_cast<double>(j) * o->center_step);
      const auto curve = ids_curve(o->disorder, grid, o->box, o->realizations, c->common.seed);
      const auto fit = holder_fit(curve, centers, o->h_min, o->h_max);
      Report r;
      Table t{"holder", {"h", "increment"}, {}};
      for (std::size_t i = 0; i < fit.h.size(); ++i) t.add({fit.h[i], fit.increments[i]});
      r.tables.push_back(std::move(t));
      r.metrics = {{"exponent", fit.exponent}, {"residual", fit.residual},
                   {"halperin_alpha", o->disorder > 0 ? halperin_alpha(o->disorder) : INFINITY}};
      r.check("fit_residual", fit.residual < 0.1, Status::kWarn, fit.residual, 0.1);
      return r;
    };
    cmd->app = sub;
    cmd->id = "ids holder";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      std::string lambdas = "0.5,1";
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("halperin", "Halperin exponent 2 log 2 / arccosh(1 + lambda)");
    sub->add_option("--lambda", o->lambdas, "Comma separated disorder values");
    cmd->run = [o] {
      const auto lambdas = parse_list(o->lambdas, "--lambda");
      Report r;
      Table t{"halperin", {"lambda", "alpha", "small_lambda_asymptote"}, {}};
      for (double l : lambdas) {
        if (!(l > 0)) throw UsageError("--lambda: must be positive");
        t.add({l, halperin_alpha(l), 2 * std::numbers::ln2 / std::sqrt(2 * l)});
      }
      r.tables.push_back(std::move(t));
      return r;
    };
    cmd->app = sub;
    cmd->id = "ids halperin";
    cmds.push_back(std::move(cmd));
  }
}

// ----------------------------------------------------------------- green

void add_green(CLI::App& app, std::vector<std::unique_ptr<Command>>& cmds) {
  auto* group = app.add_subcommand("green", "Green's function moments");
  group->require_subcommand(1);
  struct Base {
    Model model;
    std::uint64_t n_prime = 10'000;
    std::uint64_t realizations = 1000;
    std::string method = "box";
  };
  auto add_base = [](CLI::App* sub, Base& b, std::uint64_t realizations, const std::string& method) {
    add_model(sub, b.model, 1.0, 0.1);
    b.realizations = realizations;
    b.method = method;
    sub->add_option("--nprime", b.n_prime, "Box half-width N'");
    sub->add_option("--realizations", b.realizations, "Potentials R");
    sub->add_option("--method", b.method, "ratio or box")->check(CLI::IsMember({"ratio", "box", "both"}));
  };
  {
    struct Opts {
      Base base;
      double y = 1e-6;
      double tol = 1e-3;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("abs", "|G(0,0,E+iy)| per realization");
    add_base(sub, o->base, 1, "both");
    sub->add_option("--y", o->y, "Imaginary part y")->check(CLI::PositiveNumber);
    sub->add_option("--tol", o->tol, "Relative tolerance of ratio >= box");
    cmd->run = [o, c = cmd.get()] {
      const auto cfg = o->base.model.config();
      require_at_least<std::uint64_t>(o->base.n_prime, 1000, "--nprime");
      const std::complex<double> z{cfg.energy(), o->y};
      const bool box = o->base.method != "ratio", ratio = o->base.method != "box";
      const auto n = o->base.realizations;
      std::vector<double> gb(n, NAN), gr(n, NAN);
      parallel_for(n, [&](std::size_t i) {
        const auto signs = green_box_signs(o->base.n_prime, c->common.seed, i);
        if (box) gb[i] = box_green(cfg, z, signs);
        if (ratio) gr[i] = transfer_ratio(cfg, z, signs);
      });
      Report r;
      Table t{"green", {"realization", "box", "ratio"}, {}};
      bool above_one = true, resolvent = true, dominates = true;
      for (std::size_t i = 0; i < n; ++i) {
        t.add({static_cast<std::uint64_t>(i), gb[i], gr[i]});
        if (ratio) above_one = above_one && gr[i] >= 1.0 - 1e-12;
        if (box) resolvent = resolvent && gb[i] <= 1.0 / o->y;
        if (box && ratio) dominates = dominates && gr[i] >= gb[i] * (1 - o->tol);
      }
      r.tables.push_back(std::move(t));
      r.metrics = {{"box_mean", box ? mean_stderr(gb).mean : NAN},
                   {"ratio_mean", ratio ? mean_stderr(gr).mean : NAN}};
      if (ratio) r.check("ratio_at_least_one", above_one, Status::kFail, 0, 1);
      if (box) r.check("resolvent_bound", resolvent, Status::kFail, 0, 1.0 / o->y, "|G| <= 1/y");
      if (box && ratio) {
        r.check("ratio_dominates_box", dominates, Status::kWarn, 0, o->tol,
                "ratio >= |G| (1 - tol) in every realization");
      }
      return r;
    };
    cmd->app = sub;
    cmd->id = "green abs";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      Base base;
      std::string truncations = "100,1000,10000";
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("moment", "Truncated moments E min(|G|, K) on a K-grid");
    add_base(sub, o->base, 1000, "box");
    sub->add_option("--K", o->truncations, "Comma separated truncation levels");
    cmd->run = [o, c = cmd.get()] {
      const auto cfg = o->base.model.config();
      require_at_least<std::uint64_t>(o->base.n_prime, 1000, "--nprime");
      require_at_least<std::uint64_t>(o->base.realizations, 1, "--realizations");
      auto ks = parse_list(o->truncations, "--K");
      std::sort(ks.begin(), ks.end());
      if (ks.size() < 2 || ks.front() <= 1) throw UsageError("--K: need at least two values > 1");
      const auto curve = truncated_moment_curve(cfg, ks, o->base.n_prime, o->base.realizations,
                                                c->common.seed, parse_method(o->base.method));
      Report r;
      Table t{"moment", {"K", "mean"}, {}};
      bool monotone = true;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        t.add({ks[i], curve.means[i]});
        if (i > 0 && curve.means[i] < curve.means[i - 1]) monotone = false;
      }
      r.tables.push_back(std::move(t));
      r.metrics = {{"slope", curve.slope}, {"gamma_fit", 1 - curve.slope}, {"residual", curve.residual}};
      r.check("monotone_in_K", monotone, Status::kFail, 0, 0);
      r.check("slope_below_half", curve.slope < 0.5, Status::kWarn, curve.slope, 0.5);
      return r;
    };
    cmd->app = sub;
    cmd->id = "green moment";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      Base base;
      double gamma = 0.5;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("fractional", "Fractional moment E |G|^gamma");
    add_base(sub, o->base, 1000, "box");
    sub->add_option("--gamma", o->gamma, "Exponent in (0, 1)");
    cmd->run = [o, c = cmd.get()] {
      const auto cfg = o->base.model.config();
      require_at_least<std::uint64_t>(o->base.n_prime, 1000, "--nprime");
      require_at_least<std::uint64_t>(o->base.realizations, 1, "--realizations");
      if (!(o->gamma > 0 && o->gamma < 1)) throw UsageError("--gamma: must lie in (0, 1)");
      const auto fm = fractional_moment(cfg, o->gamma, o->base.n_prime, o->base.realizations,
                                        c->common.seed, parse_method(o->base.method));
      Report r;
      Table t{"fractional", {"gamma", "value", "truncated_value", "half_y_value"}, {}};
      t.add({o->gamma, fm.value, fm.truncated_value, fm.half_y_value});
      r.tables.push_back(std::move(t));
      r.metrics = {{"value", fm.value}};
      r.check("truncation_stable", fm.truncation_stable, Status::kWarn,
              std::abs(fm.truncated_value / fm.value - 1), 0.1);
      r.check("limit_stable", fm.limit_stable, Status::kWarn,
              std::abs(fm.half_y_value / fm.value - 1), 0.05);
      return r;
    };
    cmd->app = sub;
    cmd->id = "green fractional";
    cmds.push_back(std::move(cmd));
  }
}

// ------------------------------------------------------------------ cube

double sperner_pair_bound(int n) {
  // 2 C(n, n/2) / 2^n, computed in logs.
  const int half = n / 2;
  const double log_binom = std::lgamma(n + 1.0) - std::lgamma(half + 1.0) - std::lgamma(n - half + 1.0);
  return 2 * std::exp(log_binom - n * std::numbers::ln2);
}

void add_report_row(Table& t, std::uint64_t id, const LevelMassReport& rep,
                    std::vector<Cell> extra = {}) {
  std::vector<Cell> row{id, static_cast<std::int64_t>(rep.n), rep.kappa, rep.worst_t, rep.worst_count,
         rep.population, rep.worst_mass, rep.bound, rep.ratio,
         std::string(rep.holds ? "true" : "false")};
  row.insert(row.end(), extra.begin(), extra.end());
  t.add(std::move(row));
}

const std::vector<std::string> kMassColumns = {"id",    "n",          "kappa",      "worst_t",
                                               "worst_count", "population", "worst_mass", "bound",
                                               "ratio", "holds"};

void add_cube(CLI::App& app, std::vector<std::unique_ptr<Command>>& cmds) {
  auto* group = app.add_subcommand("cube", "Level-set masses on the Boolean cube");
  group->require_subcommand(1);
  {
    struct Opts {
      std::string family = "random";
      int n = 16;
      int n_min = 8;
      int n_max = 16;
      double kappa = 0;
      std::uint64_t count = 1000;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("lemma1", "Single-influence bound on monotone functions");
    sub->add_option("--family", o->family, "linear or random")->check(CLI::IsMember({"linear", "random"}));
    sub->add_option("--n", o->n, "Dimension (linear family)");
    sub->add_option("--n-min", o->n_min, "Smallest dimension (random family)");
    sub->add_option("--n-max", o->n_max, "Largest dimension (random family)");
    sub->add_option("--kappa", o->kappa, "Window half-width (0: influence floor)");
    sub->add_option("--count", o->count, "Corpus size (random family)");
    cmd->run = [o, c = cmd.get()] {
      Report r;
      Table t{"lemma1", kMassColumns, {}};
      t.columns.push_back("pair_antichain_bound");
      std::uint64_t violations = 0;
      double worst = 0;
      auto one = [&](std::uint64_t id, const CubeFunction& f) {
        const double kappa = o->kappa > 0 ? o->kappa : influence_floor(f);
        const auto rep = lemma1_check(f, kappa, EventFamily::full(f.dim()));
        add_report_row(t, id, rep, {sperner_pair_bound(f.dim())});
        violations += !rep.holds;
        worst = std::max(worst, rep.ratio);
      };
      if (o->family == "linear") {
        if (o->n < 2 || o->n > 24) throw UsageError("--n: must lie in [2, 24]");
        one(0, linear_sum(o->n));
      } else {
        if (o->n_min < 2 || o->n_max > 20 || o->n_max < o->n_min) {
          throw UsageError("--n-min/--n-max: need 2 <= n-min <= n-max <= 20");
        }
        require_at_least<std::uint64_t>(o->count, 1, "--count");
        const auto span = static_cast<std::uint64_t>(o->n_max - o->n_min + 1);
        for (std::uint64_t i = 0; i < o->count; ++i) {
          one(i, random_monotone(o->n_min + static_cast<int>(i % span), c->common.seed, i));
        }
      }
      r.tables.push_back(std::move(t));
      r.metrics = {{"functions", o->family == "linear" ? 1 : o->count},
                   {"violations", violations},
                   {"max_ratio", worst}};
      r.check("bound_holds", violations == 0, Status::kFail, static_cast<double>(violations), 0,
              "worst mass <= 1/sqrt(n) + sum_j (2 - mes Omega_j - mes Omega'_j)");
      return r;
    };
    cmd->app = sub;
    cmd->id = "cube lemma1";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      int n_min = 8;
      int n_max = 20;
      double kappa = 4;
      double delta = 0;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("lemma2", "Pair-influence bound on the linear family");
    sub->add_option("--n-min", o->n_min, "Smallest even dimension");
    sub->add_option("--n-max", o->n_max, "Largest even dimension");
    sub->add_option("--kappa", o->kappa, "Window half-width")->check(CLI::PositiveNumber);
    sub->add_option("--delta", o->delta, "Event deficit delta")->check(CLI::NonNegativeNumber);
    cmd->run = [o] {
      if (o->n_min < 2 || o->n_max > 24 || o->n_max < o->n_min) {
        throw UsageError("--n-min/--n-max: need 2 <= n-min <= n-max <= 24");
      }
      Report r;
      Table t{"lemma2", kMassColumns, {}};
      Status status = Status::kPass;
      double worst = 0;
      for (int n = o->n_min + (o->n_min % 2); n <= o->n_max; n += 2) {
        const auto rep = lemma2_check(linear_sum(n), o->kappa, o->delta, EventFamily::full_pairs(n));
        add_report_row(t, static_cast<std::uint64_t>(n), rep);
        worst = std::max(worst, rep.ratio);
        if (rep.ratio > kLemma2Fail) {
          status = worse(status, Status::kFail);
        } else if (rep.ratio > kLemma2Calibration) {
          status = worse(status, Status::kWarn);
        }
      }
      r.tables.push_back(std::move(t));
      r.metrics = {{"max_ratio", worst}, {"calibration", kLemma2Calibration}};
      r.verdicts.push_back({"ratio_calibrated", status, worst, kLemma2Calibration,
                            "ratio <= 4 passes, <= 10 warns"});
      return r;
    };
    cmd->app = sub;
    cmd->id = "cube lemma2";
    cmds.push_back(std::move(cmd));
  }
  {
    struct Opts {
      Model model;
      int steps = 16;
      double window = 0;
      bool exhaustive = false;
      std::uint64_t realizations = 0;
      double theta0 = 0;
    };
    auto o = std::make_shared<Opts>();
    auto cmd = std::make_unique<Command>();
    auto* sub = group->add_subcommand("tau", "Worst window mass of the projective image over words");
    add_model(sub, o->model, 1.0, 0.25);
    sub->add_option("--N", o->steps, "Word length");
    sub->add_option("--window", o->window, "Window half-width (0: lambda/8)");
    sub->add_flag("--exhaustive", o->exhaustive, "Enumerate all 2^N words");
    sub->add_option("--realizations", o->realizations, "Monte Carlo words (0: exhaustive)");
    sub->add_option("--theta0", o->theta0, "Initial direction");
    cmd->run = [o, c = cmd.get()] {
      const auto cfg = o->model.config();
      if (o->exhaustive && o->realizations > 0) {
        throw UsageError("--exhaustive: cannot be combined with --realizations");
      }
      if (o->steps < 1) throw UsageError("--N: must be at least 1");
      const double window = o->window > 0 ? o->window : cfg.disorder() / 8;
      if (!(window > 0)) throw UsageError("--window: lambda = 0 needs an explicit window");
      TauMassOptions opts;
      if (o->realizations > 0) {
        opts.mode = MassMode::kMonteCarlo;
        opts.realizations = o->realizations;
        opts.seed = c->common.seed;
      } else if (o->steps > 20) {
        throw UsageError("--N: exhaustive mode needs N <= 20; pass --realizations for Monte Carlo");
      }
      const auto rep = tau_level_mass(cfg, o->steps, Direction(o->theta0), window, opts);
      Report r;
      Table t{"tau", kMassColumns, {}};
      add_report_row(t, 0, rep);
      r.tables.push_back(std::move(t));
      r.metrics = {{"worst_mass", rep.worst_mass},
                   {"bound", rep.bound},
                   {"mode", rep.mode == MassMode::kExhaustive ? "exhaustive" : "monte_carlo"}};
      r.check("mass_bound", rep.holds, Status::kFail, rep.worst_mass, rep.bound,
              "worst mass <= 8 lambda");
      return r;
    };
    cmd->app = sub;
    cmd->id = "cube tau";
    cmds.push_back(std::move(cmd));
  }
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::kCsv;
  if (s == "json") return Format::kJson;
  return Format::kBoth;
}

std::string default_prefix(const std::string& id) {
  std::string p = id;
  std::replace(p.begin(), p.end(), ' ', '_');
  return p;
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(field + ": cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw UsageError(field + ": empty list");
  return out;
}

std::vector<std::unique_ptr<Command>> register_commands(CLI::App& app) {
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  std::vector<std::unique_ptr<Command>> cmds;
  add_lyapunov(app, cmds);
  add_deviation(app, cmds);
  add_pastur(app, cmds);
  add_furstenberg(app, cmds);
  add_ids(app, cmds);
  add_green(app, cmds);
  add_cube(app, cmds);
  for (auto& cmd : cmds) {
    auto* sub = cmd->app;
    auto& c = cmd->common;
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_option("--out", c.out, "Output prefix (default: the command name)");
    sub->add_option("--format", c.format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--threads", c.threads, "Worker threads (default: all cores)")
        ->envname("AB_LAB_THREADS");
    sub->add_option("--config", c.config, "File of key = value settings; flags take precedence");
  }
  return cmds;
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Anderson-Bernoulli numerical lab", "ab-lab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  auto cmds = register_commands(app);
  try {
    args = inject_config(args);
  } catch (const Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 64;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }
  Command* selected = nullptr;
  for (auto& cmd : cmds) {
    if (cmd->app->parsed()) selected = cmd.get();
  }
  if (!selected) {
    std::cerr << "usage error: no command given\n";
    return 64;
  }
  try {
    set_thread_count(selected->common.threads);
    Report report = selected->run();
    report.command = selected->id;
    report.config = config_echo(selected->app);
    const std::string prefix =
        selected->common.out.empty() ? default_prefix(selected->id) : selected->common.out;
    const auto written = emit(report, prefix, parse_format(selected->common.format));
    for (const auto& v : report.verdicts) {
      std::cout << status_name(v.status) << ' ' << v.name << " value=" << format_real(v.value)
                << " tolerance=" << format_real(v.tolerance) << '\n';
    }
    for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
    std::cout << "status " << status_name(report.status()) << '\n';
    return report.exit_code();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 64;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ablab::cli
