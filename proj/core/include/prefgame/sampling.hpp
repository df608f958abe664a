#pragma once

#include <cstddef>
#include <vector>

#include "prefgame/policy.hpp"
#include "prefgame/preference_model.hpp"
#include "prefgame/rng.hpp"

namespace prefgame {

// One labelled comparison. winner == loser happens when both draws hit the
// same response; such self-pairs are kept, not resampled.
struct PreferenceSample {
  std::size_t winner;
  std::size_t loser;
};

struct OracleMode {
  enum class Kind { kExact, kSampled };

  static OracleMode exact() { return OracleMode{Kind::kExact, 0}; }
  static OracleMode sampled(std::size_t pairs);

  bool is_exact() const { return kind == Kind::kExact; }

  Kind kind = Kind::kExact;
  std::size_t pairs_per_iteration = 0;
};

// Inverse-CDF draw over the stored ordering; u in [0,1). Returns the last
// positive-probability index when cumulative rounding leaves u uncovered.
std::size_t sample_index(const Policy& mu, double u);

// Draws y1, y2 i.i.d. from mu, then labels the winner: y1 with probability
// model(y1, y2), else y2. Consumes exactly three uniforms.
PreferenceSample sample_pair(const Policy& mu, const PreferenceModel& model,
                             RngState& rng);

std::vector<PreferenceSample> sample_pairs(const Policy& mu,
                                           const PreferenceModel& model,
                                           std::size_t count, RngState& rng);

// Per-response empirical win rate: wins(y) / appearances(y), where a
// self-pair counts one win and two appearances for its response; responses
// never seen get 1/2. Biased at small samples, consistent as the sample
// count grows.
GradientVector estimate_win_gradient(const Policy& mu,
                                     const std::vector<PreferenceSample>& samples);

}  // namespace prefgame
