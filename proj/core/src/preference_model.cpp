#include "prefgame/preference_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prefgame/errors.hpp"

namespace prefgame {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

PreferenceModel PreferenceModel::from_matrix(
    const std::vector<std::vector<double>>& p, double tol) {
  const std::size_t n = p.size();
  if (n == 0) throw StructuralError("PreferenceModel: empty matrix");
  for (const auto& row : p)
    if (row.size() != n)
      throw StructuralError("PreferenceModel: matrix is not square");
  std::vector<double> flat(n * n, 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = p[i][j];
      if (!std::isfinite(v))
        throw DomainError("PreferenceModel: non-finite entry (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      if (v < -tol || v > 1.0 + tol)
        throw DomainError("PreferenceModel: entry outside [0,1] at (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      if (std::abs(p[i][j] + p[j][i] - 1.0) > tol)
        throw DomainError("PreferenceModel: complement identity violated at (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    flat[i * n + i] = 0.5;
    for (std::size_t j = i + 1; j < n; ++j) {
      // exact complements are kept bit-for-bit so reloading is idempotent
      double a = p[i][j] + p[j][i] == 1.0
                     ? p[i][j]
                     : std::clamp(0.5 * (p[i][j] + 1.0 - p[j][i]), 0.0, 1.0);
      flat[i * n + j] = a;
      flat[j * n + i] = 1.0 - a;
    }
  }
  return PreferenceModel(n, std::move(flat));
}

PreferenceModel PreferenceModel::bradley_terry(
    const std::vector<double>& rewards) {
  const std::size_t n = rewards.size();
  if (n == 0) throw StructuralError("bradley_terry: empty reward vector");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(rewards[i]))
      throw DomainError("bradley_terry: non-finite reward at index " +
                        std::to_string(i));
  std::vector<double> flat(n * n, 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = stable_sigmoid(rewards[i] - rewards[j]);
      flat[i * n + j] = a;
      flat[j * n + i] = 1.0 - a;  // exact complement
    }
  }
  return PreferenceModel(n, std::move(flat));
}

double win_rate(const Policy& p1, const Policy& p2, const PreferenceModel& m) {
  if (p1.size() != m.size() || p2.size() != m.size())
    throw StructuralError("win_rate: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (p1[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) row += m(i, j) * p2[j];
    total += p1[i] * row;
  }
  return total;
}

double game_value(const Policy& p1, const Policy& p2,
                  const PreferenceModel& m) {
  return win_rate(p1, p2, m) - 0.5;
}

GradientVector unreg_gradient(const Policy& opponent,
                              const PreferenceModel& m) {
  if (opponent.size() != m.size())
    throw StructuralError("unreg_gradient: dimension mismatch");
  std::vector<double> g(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) row += m(i, j) * opponent[j];
    g[i] = row;
  }
  return GradientVector(std::move(g));
}

double duality_gap(const Policy& p, const PreferenceModel& m) {
  GradientVector g = unreg_gradient(p, m);
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) best = std::max(best, g[i]);
  return std::max(0.0, best - 0.5);
}

RegularizedGame::RegularizedGame(PreferenceModel model_in, double tau_in,
                                 Policy reference_in)
    : model(std::move(model_in)),
      tau(tau_in),
      reference(std::move(reference_in)) {
  if (!(tau > 0.0)) throw DomainError("RegularizedGame: tau must be positive");
  if (reference.size() != model.size())
    throw StructuralError("RegularizedGame: reference/model size mismatch");
}

double regularized_value(const Policy& p1, const Policy& p2,
                         const RegularizedGame& game) {
  return game_value(p1, p2, game.model) -
         game.tau * kl_divergence(p1, game.reference) +
         game.tau * kl_divergence(p2, game.reference);
}

GradientVector reg_gradient(const Policy& current,
                            const RegularizedGame& game) {
  if (current.size() != game.model.size())
    throw StructuralError("reg_gradient: dimension mismatch");
  GradientVector g = unreg_gradient(current, game.model);
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double cur = current[i];
    double ref = game.reference[i];
    if (cur == 0.0 && ref == 0.0) {
      out[i] = g[i];  // coordinate outside both supports; prox keeps it at 0
      continue;
    }
    if (cur == 0.0 || ref == 0.0)
      throw DomainError("reg_gradient: support violation at index " +
                        std::to_string(i));
    out[i] = g[i] - game.tau * (std::log(cur / ref) + 1.0);
  }
  return GradientVector(std::move(out));
}

}  // namespace prefgame
