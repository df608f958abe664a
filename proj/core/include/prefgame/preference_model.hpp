#pragma once

#include <cstddef>
#include <vector>

#include "prefgame/policy.hpp"

namespace prefgame {

// Pairwise win-probability matrix: entry (i, j) is the probability response i
// beats response j. Skew-symmetric around 1/2: P(i,j) + P(j,i) = 1, so the
// diagonal is exactly 0.5. May contain intransitive cycles.
class PreferenceModel {
 public:
  // Validates entries in [0,1] and the complement identity within `tol`,
  // then symmetrizes P <- (P + (1 - P^T)) / 2 so the identity holds exactly.
  static PreferenceModel from_matrix(const std::vector<std::vector<double>>& p,
                                     double tol = 1e-12);

  // P(i,j) = sigmoid(rewards[i] - rewards[j]); always transitive.
  static PreferenceModel bradley_terry(const std::vector<double>& rewards);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return p_[i * n_ + j];
  }
  const std::vector<double>& flat() const { return p_; }

 private:
  PreferenceModel(std::size_t n, std::vector<double> p)
      : n_(n), p_(std::move(p)) {}

  std::size_t n_ = 0;
  std::vector<double> p_;  // row-major
};

// p1^T P p2: probability a response drawn from p1 beats one drawn from p2.
double win_rate(const Policy& p1, const Policy& p2, const PreferenceModel& m);

// win_rate - 1/2; antisymmetric zero-sum objective.
double game_value(const Policy& p1, const Policy& p2, const PreferenceModel& m);

// Entry y = P(y beats opponent) = sum_y' P(y,y') opponent(y').
GradientVector unreg_gradient(const Policy& opponent, const PreferenceModel& m);

// Best-response advantage max_y P(y beats p) - 1/2, clamped at zero. In a
// symmetric game the best response is pure, so this is exact exploitability.
double duality_gap(const Policy& p, const PreferenceModel& m);

// The zero-sum game plus +/- tau KL penalties toward a reference policy.
struct RegularizedGame {
  RegularizedGame(PreferenceModel model, double tau, Policy reference);

  PreferenceModel model;
  double tau;
  Policy reference;
};

// J(p1,p2) - tau KL(p1||ref) + tau KL(p2||ref).
double regularized_value(const Policy& p1, const Policy& p2,
                         const RegularizedGame& game);

// unreg_gradient(current) - tau (log(current/reference) + 1). The +1 is a
// constant shift and cancels in prox; it is kept to match the update rule as
// written. Both current and reference must be positive wherever either is.
GradientVector reg_gradient(const Policy& current, const RegularizedGame& game);

}  // namespace prefgame
