#include "prefgame/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "prefgame/errors.hpp"
#include "prefgame/regression.hpp"

namespace prefgame {

namespace {

constexpr std::size_t kInnerCap = 1000000;
// Below this step-KL the iterate cannot be resolved further in doubles;
// floating-point limit cycles of a contraction live under this floor.
constexpr double kInnerKlFloor = 1e-26;

double metric_kl(const Policy& p, const Policy& q) {
  try {
    return kl_divergence(p, q);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Cancellation-free upper bound on KL(p||q): the chi-square divergence.
// Direct KL evaluation loses to rounding noise once the policies are within
// ~1e-9 of each other, which is exactly where inner-loop stopping decisions
// are made.
double chi2_step(const Policy& p, const Policy& q) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] == 0.0) continue;
    double d = p[i] - q[i];
    total += d * d / q[i];
  }
  return total;
}

struct RunContext {
  const PreferenceModel& model;
  Policy nash;

  void append(Trajectory& traj, std::size_t outer, std::size_t inner,
              const Policy& policy, const Policy& reference) const {
    traj.steps.push_back(TrajectoryStep{outer, inner, policy,
                                        metric_kl(nash, policy),
                                        duality_gap(policy, model),
                                        metric_kl(policy, reference)});
  }
};

Policy initial_policy(const PreferenceModel& model, const SolverConfig& config) {
  Policy p{config.initial};
  if (p.size() != model.size())
    throw StructuralError("SolverConfig: initial policy size mismatch");
  return p;
}

void validate_config(const SolverConfig& config, Algorithm expected) {
  if (config.algorithm != expected)
    throw StructuralError("config.algorithm does not match the entry point");
  if (!(config.eta > 0.0)) throw DomainError("SolverConfig: eta must be positive");
  if (config.tau < 0.0) throw DomainError("SolverConfig: tau must be non-negative");
  if (config.outer_iterations == 0)
    throw DomainError("SolverConfig: outer_iterations must be positive");
  const bool needs_tau = expected == Algorithm::kInpo || expected == Algorithm::kComal;
  if (needs_tau && !(config.tau > 0.0))
    throw DomainError("SolverConfig: this algorithm requires tau > 0");
  if (expected == Algorithm::kComal && config.inner_iterations == 0)
    throw DomainError("SolverConfig: COMAL requires inner_iterations >= 1");
  if (config.oracle.kind == OracleMode::Kind::kSampled &&
      config.oracle.pairs_per_iteration == 0)
    throw DomainError("SolverConfig: sampled oracle needs pairs_per_iteration >= 1");
}

GradientVector win_gradient(const PreferenceModel& model, const Policy& at,
                            const SolverConfig& config, RngState& rng) {
  if (config.oracle.is_exact()) return unreg_gradient(at, model);
  auto samples =
      sample_pairs(at, model, config.oracle.pairs_per_iteration, rng);
  return estimate_win_gradient(at, samples);
}

OptimizerOptions solver_optimizer_defaults() { return OptimizerOptions{}; }

Trajectory make_trajectory(const SolverConfig& config, Policy nash) {
  return Trajectory{config, {}, std::move(nash)};
}

// Plain ascent against the opponent's current policy; also the exact-mode
// iterate sequence of iterative IPO.
Trajectory run_mwu_like(const PreferenceModel& model,
                        const SolverConfig& config) {
  RunContext ctx{model, solve_nash(model, 1e-10).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy initial = initial_policy(model, config);
  Policy pi = initial;
  RngState rng(config.seed, config.stream);
  ctx.append(traj, 0, 0, pi, initial);
  for (std::size_t t = 1; t <= config.outer_iterations; ++t) {
    GradientVector g = win_gradient(model, pi, config, rng);
    pi = mwu_step(pi, g, config.eta);
    ctx.append(traj, t, 0, pi, initial);
  }
  return traj;
}

// One regression update, with iteration context attached to failures.
Policy regression_update(const RegressionSpec& spec, const Policy& warm_start,
                         std::size_t t) {
  try {
    return minimize(spec, LogitParams::from_policy(warm_start)).policy;
  } catch (const SolverFailure& e) {
    throw SolverFailure("iteration " + std::to_string(t) + ": " + e.what());
  }
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kMwu: return "MWU";
    case Algorithm::kIterDpo: return "IterDPO";
    case Algorithm::kIterIpo: return "IterIPO";
    case Algorithm::kSppo: return "SPPO";
    case Algorithm::kInpo: return "INPO";
    case Algorithm::kComal: return "COMAL";
    case Algorithm::kMirrorProx: return "MirrorProx";
    case Algorithm::kOmwu: return "OMWU";
  }
  throw StructuralError("unknown algorithm");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "MWU") return Algorithm::kMwu;
  if (name == "IterDPO") return Algorithm::kIterDpo;
  if (name == "IterIPO") return Algorithm::kIterIpo;
  if (name == "SPPO") return Algorithm::kSppo;
  if (name == "INPO") return Algorithm::kInpo;
  if (name == "COMAL") return Algorithm::kComal;
  if (name == "MirrorProx") return Algorithm::kMirrorProx;
  if (name == "OMWU") return Algorithm::kOmwu;
  throw ConfigError("unknown algorithm name: " + name);
}

double ToleranceSchedule::epsilon(std::size_t t) const {
  if (t == 0) throw StructuralError("ToleranceSchedule: t starts at 1");
  double td = static_cast<double>(t);
  return c1 * c1 / (9.0 * td * td * td * td);
}

ToleranceSchedule build_tolerance_schedule(const Policy& initial,
                                           const Policy& nash) {
  if (initial.size() != nash.size())
    throw StructuralError("build_tolerance_schedule: dimension mismatch");
  double p_min = 1.0;
  bool overlap = false;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    if (initial[i] > 0.0) {
      if (nash[i] == 0.0)
        throw DomainError(
            "build_tolerance_schedule: equilibrium lacks support at index " +
            std::to_string(i));
      overlap = true;
      p_min = std::min(p_min, nash[i]);
    }
  }
  if (!overlap)
    throw DomainError("build_tolerance_schedule: empty support overlap");
  double p_sft = initial.min_positive();
  double d_bound = static_cast<double>(initial.size()) * std::log(1.0 / p_sft);
  double c1 = p_min / std::exp((d_bound + 2.0) / p_min);
  double c2 = c1 / std::exp(1.0 / c1);  // underflows to 0 for small c1
  return ToleranceSchedule{p_sft, d_bound, p_min, c1, c2};
}

std::vector<const TrajectoryStep*> outer_steps(const Trajectory& traj) {
  std::vector<const TrajectoryStep*> out;
  for (const auto& s : traj.steps)
    if (s.inner_iter == 0) out.push_back(&s);
  return out;
}

Policy mwu_step(const Policy& current, const GradientVector& g, double eta) {
  return prox(current, scaled(g, eta));
}

Trajectory run_mwu(const PreferenceModel& model, const SolverConfig& config) {
  validate_config(config, Algorithm::kMwu);
  return run_mwu_like(model, config);
}

Trajectory run_iter_ipo(const PreferenceModel& model,
                        const SolverConfig& config) {
  validate_config(config, Algorithm::kIterIpo);
  // Exactly minimizing the IPO loss is one entropic ascent step, so the
  // exact-mode run shares the MWU iterate path bit for bit.
  if (config.oracle.is_exact()) return run_mwu_like(model, config);

  RunContext ctx{model, solve_nash(model, 1e-10).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy initial = initial_policy(model, config);
  Policy pi = initial;
  RngState rng(config.seed, config.stream);
  ctx.append(traj, 0, 0, pi, initial);
  for (std::size_t t = 1; t <= config.outer_iterations; ++t) {
    auto samples =
        sample_pairs(pi, model, config.oracle.pairs_per_iteration, rng);
    RegressionSpec spec{LossKind::kIpo,
                        config.eta,
                        0.0,
                        pi,
                        std::nullopt,
                        PairWeights::empirical(model.size(), samples),
                        std::nullopt,
                        solver_optimizer_defaults()};
    pi = regression_update(spec, pi, t);
    ctx.append(traj, t, 0, pi, initial);
  }
  return traj;
}

Trajectory run_iter_dpo(const PreferenceModel& model,
                        const SolverConfig& config) {
  validate_config(config, Algorithm::kIterDpo);
  RunContext ctx{model, solve_nash(model, 1e-10).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy initial = initial_policy(model, config);
  Policy pi = initial;
  RngState rng(config.seed, config.stream);
  ctx.append(traj, 0, 0, pi, initial);
  for (std::size_t t = 1; t <= config.outer_iterations; ++t) {
    PairWeights pairs =
        config.oracle.is_exact()
            ? PairWeights::population(pi, model)
            : PairWeights::empirical(
                  model.size(),
                  sample_pairs(pi, model, config.oracle.pairs_per_iteration, rng));
    RegressionSpec spec{LossKind::kDpo,
                        config.eta,
                        0.0,
                        pi,
                        std::nullopt,
                        std::move(pairs),
                        std::nullopt,
                        solver_optimizer_defaults()};
    pi = regression_update(spec, pi, t);
    ctx.append(traj, t, 0, pi, initial);
  }
  return traj;
}

Trajectory run_sppo(const PreferenceModel& model, const SolverConfig& config) {
  validate_config(config, Algorithm::kSppo);
  RunContext ctx{model, solve_nash(model, 1e-10).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy initial = initial_policy(model, config);
  Policy pi = initial;
  RngState rng(config.seed, config.stream);
  ctx.append(traj, 0, 0, pi, initial);
  for (std::size_t t = 1; t <= config.outer_iterations; ++t) {
    GradientVector g = win_gradient(model, pi, config, rng);
    RegressionSpec spec{LossKind::kSppo,
                        config.eta,
                        0.0,
                        pi,
                        std::nullopt,
                        std::nullopt,
                        std::move(g),
                        solver_optimizer_defaults()};
    pi = regression_update(spec, pi, t);
    ctx.append(traj, t, 0, pi, initial);
  }
  return traj;
}

Trajectory run_inpo(const PreferenceModel& model, const SolverConfig& config) {
  validate_config(config, Algorithm::kInpo);
  RunContext ctx{model, solve_nash(model, 1e-10).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy reference = initial_policy(model, config);
  RegularizedGame game{model, config.tau, reference};
  Policy pi = reference;
  RngState rng(config.seed, config.stream);
  ctx.append(traj, 0, 0, pi, reference);
  for (std::size_t t = 1; t <= config.outer_iterations; ++t) {
    if (config.oracle.is_exact()) {
      pi = prox(pi, scaled(reg_gradient(pi, game), config.eta));
    } else {
      auto samples =
          sample_pairs(pi, model, config.oracle.pairs_per_iteration, rng);
      RegressionSpec spec{LossKind::kInpo,
                          config.eta,
                          config.tau,
                          reference,
                          pi,
                          PairWeights::empirical(model.size(), samples),
                          std::nullopt,
                          solver_optimizer_defaults()};
      pi = regression_update(spec, pi, t);
    }
    ctx.append(traj, t, 0, pi, reference);
  }
  return traj;
}

Trajectory run_comal(const PreferenceModel& model, const SolverConfig& config) {
  validate_config(config, Algorithm::kComal);
  RunContext ctx{model, solve_nash(model, 1e-10).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy initial = initial_policy(model, config);
  Policy pi = initial;
  RngState rng(config.seed, config.stream);

  const bool theoretical = config.epsilon_schedule == InnerSchedule::kTheoretical;
  ToleranceSchedule schedule{};
  if (theoretical) schedule = build_tolerance_schedule(initial, ctx.nash);

  const double surrogate_scale =
      (config.eta * config.tau / 2.0) * (config.eta * config.tau / 2.0);

  ctx.append(traj, 0, 0, pi, pi);
  for (std::size_t t = 1; t < config.outer_iterations; ++t) {
    Policy anchor = pi;
    RegularizedGame game{model, config.tau, anchor};
    Policy mu = anchor;
    std::vector<std::vector<double>> recent;

    auto update = [&](const Policy& cur) -> Policy {
      if (config.oracle.is_exact())
        return prox(cur, scaled(reg_gradient(cur, game), config.eta));
      auto samples =
          sample_pairs(cur, model, config.oracle.pairs_per_iteration, rng);
      RegressionSpec spec{LossKind::kInpo,
                          config.eta,
                          config.tau,
                          anchor,
                          cur,
                          PairWeights::empirical(model.size(), samples),
                          std::nullopt,
                          solver_optimizer_defaults()};
      return regression_update(spec, cur, t);
    };

    if (!theoretical) {
      for (std::size_t k = 1; k <= config.inner_iterations; ++k) {
        mu = update(mu);
        ctx.append(traj, t, k, mu, anchor);
      }
    } else {
      const double eps_t = schedule.epsilon(t);
      bool done = false;
      for (std::size_t k = 1; k <= kInnerCap; ++k) {
        Policy next = update(mu);
        ctx.append(traj, t, k, next, anchor);
        double d = chi2_step(next, mu);
        bool cycle = next.probs() == mu.probs();
        for (const auto& past : recent)
          if (next.probs() == past) cycle = true;
        recent.push_back(mu.probs());
        if (recent.size() > 4) recent.erase(recent.begin());
        mu = next;
        if (cycle || d <= kInnerKlFloor || d / surrogate_scale <= eps_t) {
          done = true;
          break;
        }
      }
      if (!done)
        throw SolverFailure("run_comal: inner solve at outer iteration " +
                            std::to_string(t) + " exhausted its budget");
    }
    pi = mu;
    ctx.append(traj, t, 0, pi, anchor);
  }
  return traj;
}

Trajectory run_mirror_prox(const PreferenceModel& model,
                           const SolverConfig& config) {
  validate_config(config, Algorithm::kMirrorProx);
  RunContext ctx{model, solve_nash(model, 1e-10).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy initial = initial_policy(model, config);
  Policy pi = initial;
  RngState rng(config.seed, config.stream);
  ctx.append(traj, 0, 0, pi, initial);
  for (std::size_t t = 1; t <= config.outer_iterations; ++t) {
    GradientVector g_here = win_gradient(model, pi, config, rng);
    Policy half = mwu_step(pi, g_here, config.eta);
    GradientVector g_half = win_gradient(model, half, config, rng);
    pi = mwu_step(pi, g_half, config.eta);
    ctx.append(traj, t, 0, pi, initial);
  }
  return traj;
}

Trajectory run_omwu(const PreferenceModel& model, const SolverConfig& config) {
  validate_config(config, Algorithm::kOmwu);
  RunContext ctx{model, solve_nash(model, 1e-10).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy initial = initial_policy(model, config);
  Policy pi = initial;
  RngState rng(config.seed, config.stream);
  ctx.append(traj, 0, 0, pi, initial);
  // The run starts with equal consecutive iterates, so the lagged gradient
  // begins as the current one.
  GradientVector g_prev = win_gradient(model, pi, config, rng);
  for (std::size_t t = 1; t <= config.outer_iterations; ++t) {
    GradientVector g_cur =
        t == 1 ? g_prev : win_gradient(model, pi, config, rng);
    std::vector<double> opt(g_cur.size());
    for (std::size_t i = 0; i < opt.size(); ++i)
      opt[i] = 2.0 * g_cur[i] - g_prev[i];
    pi = mwu_step(pi, GradientVector(std::move(opt)), config.eta);
    g_prev = std::move(g_cur);
    ctx.append(traj, t, 0, pi, initial);
  }
  return traj;
}

Trajectory run_regularized_solver(const RegularizedGame& game,
                                  const SolverConfig& config) {
  if (!(config.eta > 0.0)) throw DomainError("SolverConfig: eta must be positive");
  if (config.inner_iterations == 0)
    throw DomainError("run_regularized_solver: K must be at least 1");
  RunContext ctx{game.model, solve_regularized_nash(game, 1e-12).policy};
  Trajectory traj = make_trajectory(config, ctx.nash);
  Policy mu = game.reference;
  RngState rng(config.seed, config.stream);
  ctx.append(traj, 0, 0, mu, game.reference);
  for (std::size_t k = 1; k < config.inner_iterations; ++k) {
    GradientVector g_win = win_gradient(game.model, mu, config, rng);
    std::vector<double> g(g_win.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      double cur = mu[i], ref = game.reference[i];
      if (cur == 0.0 && ref == 0.0) {
        g[i] = g_win[i];
        continue;
      }
      if (cur == 0.0 || ref == 0.0)
        throw DomainError("run_regularized_solver: support violation");
      g[i] = g_win[i] - game.tau * (std::log(cur / ref) + 1.0);
    }
    mu = mwu_step(mu, GradientVector(std::move(g)), config.eta);
    ctx.append(traj, 0, k, mu, game.reference);
  }
  return traj;
}

Trajectory run_solver(const PreferenceModel& model, const SolverConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kMwu: return run_mwu(model, config);
    case Algorithm::kIterDpo: return run_iter_dpo(model, config);
    case Algorithm::kIterIpo: return run_iter_ipo(model, config);
    case Algorithm::kSppo: return run_sppo(model, config);
    case Algorithm::kInpo: return run_inpo(model, config);
    case Algorithm::kComal: return run_comal(model, config);
    case Algorithm::kMirrorProx: return run_mirror_prox(model, config);
    case Algorithm::kOmwu: return run_omwu(model, config);
  }
  throw StructuralError("run_solver: unknown algorithm");
}

}  // namespace prefgame
