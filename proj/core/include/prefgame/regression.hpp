#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "prefgame/policy.hpp"
#include "prefgame/preference_model.hpp"
#include "prefgame/sampling.hpp"

namespace prefgame {

enum class LossKind { kDpo, kIpo, kInpo, kSppo, kDro, kRebel };

// Tabular log-policy parameterization: policy = softmax(logits), with
// logits[0] pinned to 0 so the parameterization is identifiable.
struct LogitParams {
  explicit LogitParams(std::vector<double> logits_in);
  static LogitParams from_policy(const Policy& p);

  Policy to_policy() const;

  std::vector<double> logits;
};

// Distribution over ordered (winner, loser) pairs; rows index winners.
// Population weights come from exhaustive enumeration of draw pairs under mu
// and the label probabilities; empirical weights are normalized counts.
class PairWeights {
 public:
  static PairWeights population(const Policy& mu, const PreferenceModel& model);
  static PairWeights empirical(std::size_t n,
                               const std::vector<PreferenceSample>& samples);

  std::size_t size() const { return n_; }
  double at(std::size_t winner, std::size_t loser) const {
    return w_[winner * n_ + loser];
  }

 private:
  PairWeights(std::size_t n, std::vector<double> w)
      : n_(n), w_(std::move(w)) {}
  std::size_t n_;
  std::vector<double> w_;
};

struct OptimizerOptions {
  std::size_t max_steps = 100000;
  double gradient_tolerance = 1e-10;
  double logit_cap = 30.0;  // applied to the DPO loss only
};

struct RegressionSpec {
  LossKind loss;
  double eta = 0.3;
  double tau = 0.0;  // INPO only
  // Log-ratio base: the anchored policy pi for DPO/IPO/SPPO/DRO/REBEL, the
  // fixed reference for INPO.
  Policy reference;
  // Sampling/opponent policy mu; defaults to `reference`. Required for INPO
  // (its second reference) and used as the expectation weight everywhere.
  std::optional<Policy> anchor;
  // Pair data for DPO/IPO/INPO.
  std::optional<PairWeights> pairs;
  // Win-rate targets for SPPO/DRO/REBEL.
  std::optional<GradientVector> targets;
  OptimizerOptions optimizer;
};

struct RegressionResult {
  Policy policy;
  LogitParams logits;
  bool capped;       // any logit ended on the cap (DPO)
  std::size_t steps;
  double gradient_norm;
  double v_phi;      // fitted normalization scalar (DRO), else 0
};

// Full-batch gradient descent over logits with backtracking line search
// (Barzilai-Borwein initial step). Stops when the projected gradient
// infinity-norm drops to optimizer.gradient_tolerance; throws SolverFailure
// carrying the final norm if max_steps is exhausted first.
RegressionResult minimize(const RegressionSpec& spec, const LogitParams& init);

// Exact loss value at a full-support candidate policy, using the spec's
// pair weights or targets. For DRO the normalization scalar is profiled out
// at its closed-form optimum.
double population_loss(const RegressionSpec& spec, const Policy& candidate);

}  // namespace prefgame
