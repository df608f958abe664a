#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "prefgame/nash.hpp"
#include "prefgame/policy.hpp"
#include "prefgame/preference_model.hpp"
#include "prefgame/sampling.hpp"

namespace prefgame {

enum class Algorithm {
  kMwu,
  kIterDpo,
  kIterIpo,
  kSppo,
  kInpo,
  kComal,
  kMirrorProx,
  kOmwu,
};

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

// Inner-solve regime for the re-anchoring solver: a fixed number of inner
// steps per outer iteration, or a per-iteration tolerance schedule
// epsilon_t = c1^2 / (9 t^4) that makes the inner solves effectively exact.
enum class InnerSchedule { kFixedK, kTheoretical };

struct SolverConfig {
  Algorithm algorithm = Algorithm::kMwu;
  double eta = 0.3;
  double tau = 0.0;
  std::size_t outer_iterations = 1;   // update steps; outer iterates for COMAL
  std::size_t inner_iterations = 1;   // K_t, COMAL FixedK mode only
  InnerSchedule epsilon_schedule = InnerSchedule::kFixedK;
  OracleMode oracle = OracleMode::exact();
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> initial;  // initial policy probabilities
};

// Constants of the inner-tolerance schedule, derived from the initial policy
// and the equilibrium: p_sft is the smallest positive initial probability,
// D = n log(1/p_sft), p_min the smallest equilibrium probability on the
// support, c1 = p_min / exp((D+2)/p_min), c2 = c1 / exp(1/c1) (which
// underflows to zero at double precision for all but tiny D).
struct ToleranceSchedule {
  double p_sft;
  double d_bound;
  double p_min;
  double c1;
  double c2;

  double epsilon(std::size_t t) const;
};

ToleranceSchedule build_tolerance_schedule(const Policy& initial,
                                           const Policy& nash);

struct TrajectoryStep {
  std::size_t outer_iter;
  std::size_t inner_iter;
  Policy policy;
  double kl_to_nash;       // KL(equilibrium || policy)
  double duality_gap;
  double kl_to_reference;  // KL(policy || reference in effect at this step)
};

struct Trajectory {
  SolverConfig config;
  std::vector<TrajectoryStep> steps;
  Policy nash_reference;
};

// Steps with inner_iter == 0: the initial policy plus each committed outer
// iterate (for re-anchoring runs) or every iterate (plain runs).
std::vector<const TrajectoryStep*> outer_steps(const Trajectory& traj);

// One entropic ascent update: prox(current, eta * g).
Policy mwu_step(const Policy& current, const GradientVector& g, double eta);

Trajectory run_mwu(const PreferenceModel& model, const SolverConfig& config);
Trajectory run_iter_dpo(const PreferenceModel& model, const SolverConfig& config);
Trajectory run_iter_ipo(const PreferenceModel& model, const SolverConfig& config);
Trajectory run_sppo(const PreferenceModel& model, const SolverConfig& config);
Trajectory run_inpo(const PreferenceModel& model, const SolverConfig& config);
Trajectory run_comal(const PreferenceModel& model, const SolverConfig& config);
Trajectory run_mirror_prox(const PreferenceModel& model,
                           const SolverConfig& config);
Trajectory run_omwu(const PreferenceModel& model, const SolverConfig& config);

// Damped best-response iteration on the regularized game, K iterates
// (K - 1 prox updates), initialized at the game's reference. kl_to_nash is
// logged against the regularized equilibrium, solved to 1e-12 first.
Trajectory run_regularized_solver(const RegularizedGame& game,
                                  const SolverConfig& config);

// Dispatch on config.algorithm.
Trajectory run_solver(const PreferenceModel& model, const SolverConfig& config);

}  // namespace prefgame
