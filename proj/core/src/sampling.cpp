#include "prefgame/sampling.hpp"

#include "prefgame/errors.hpp"

namespace prefgame {

OracleMode OracleMode::sampled(std::size_t pairs) {
  if (pairs == 0)
    throw DomainError("OracleMode: pairs_per_iteration must be at least 1");
  return OracleMode{Kind::kSampled, pairs};
}

std::size_t sample_index(const Policy& mu, double u) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0) last_positive = i;
    cum += mu[i];
    if (u < cum) return i;
  }
  return last_positive;
}

PreferenceSample sample_pair(const Policy& mu, const PreferenceModel& model,
                             RngState& rng) {
  if (mu.size() != model.size())
    throw StructuralError("sample_pair: dimension mismatch");
  std::size_t y1 = sample_index(mu, rng.next_double());
  std::size_t y2 = sample_index(mu, rng.next_double());
  double u = rng.next_double();
  if (u < model(y1, y2)) return PreferenceSample{y1, y2};
  return PreferenceSample{y2, y1};
}

std::vector<PreferenceSample> sample_pairs(const Policy& mu,
                                           const PreferenceModel& model,
                                           std::size_t count, RngState& rng) {
  std::vector<PreferenceSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(sample_pair(mu, model, rng));
  return out;
}

GradientVector estimate_win_gradient(
    const Policy& mu, const std::vector<PreferenceSample>& samples) {
  if (samples.empty())
    throw DomainError("estimate_win_gradient: empty sample list");
  const std::size_t n = mu.size();
  std::vector<double> wins(n, 0.0);
  std::vector<double> appearances(n, 0.0);
  for (const auto& s : samples) {
    wins[s.winner] += 1.0;
    appearances[s.winner] += 1.0;
    appearances[s.loser] += 1.0;
  }
  std::vector<double> g(n, 0.5);
  for (std::size_t y = 0; y < n; ++y)
    if (appearances[y] > 0.0) g[y] = wins[y] / appearances[y];
  return GradientVector(std::move(g));
}

}  // namespace prefgame
