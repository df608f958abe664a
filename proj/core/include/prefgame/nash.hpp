#pragma once

#include "prefgame/policy.hpp"
#include "prefgame/preference_model.hpp"

namespace prefgame {

enum class NashMethod { kSupportEnumeration, kFixedPoint };

struct NashResult {
  Policy policy;
  double gap;  // duality gap (enumeration) or scaled fixed-point residual
  NashMethod method;
};

// Symmetric equilibrium by support enumeration (n <= 12). Supports are tried
// in order of increasing size, lexicographic within a size; for each the
// linear system "payoff 1/2 on the support, total mass 1" is solved by least
// squares and the candidate accepted if it is a valid policy whose measured
// duality gap is within tol. The all-indifferent game returns uniform.
NashResult solve_nash(const PreferenceModel& model, double tol);

// Equilibrium of the KL-regularized game by damped fixed-point iteration
// mu <- prox(mu, eta * reg_gradient(mu)) with the contraction-safe step
// eta = tau / (tau^2 + 1/2), stopping when the infinity-norm step drops
// below tol * eta * tau (or at a floating-point fixed point). The reported
// gap is the final step scaled by 1/(eta tau).
NashResult solve_regularized_nash(const RegularizedGame& game, double tol);

}  // namespace prefgame
