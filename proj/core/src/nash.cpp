#include "prefgame/nash.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "prefgame/errors.hpp"

namespace prefgame {

namespace {

constexpr std::size_t kMaxEnumerationSize = 12;
constexpr double kSystemResidualTol = 1e-8;
constexpr std::size_t kFixedPointCap = 10000000;

// Lexicographic successor of a k-combination of {0..n-1}; false when done.
bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

NashResult solve_nash(const PreferenceModel& model, double tol) {
  const std::size_t n = model.size();
  if (n > kMaxEnumerationSize)
    throw StructuralError("solve_nash: support enumeration limited to n <= 12");

  bool indifferent = true;
  for (std::size_t i = 0; i < n && indifferent; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(model(i, j) - 0.5) > 1e-12) {
        indifferent = false;
        break;
      }
  if (indifferent) {
    Policy u = Policy::uniform(n);
    return NashResult{u, duality_gap(u, model), NashMethod::kSupportEnumeration};
  }

  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> support(k);
    for (std::size_t i = 0; i < k; ++i) support[i] = i;
    do {
      Eigen::MatrixXd a(k + 1, k);
      Eigen::VectorXd b(k + 1);
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c)
          a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              model(support[r], support[c]);
        b(static_cast<Eigen::Index>(r)) = 0.5;
      }
      for (std::size_t c = 0; c < k; ++c)
        a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = 1.0;
      b(static_cast<Eigen::Index>(k)) = 1.0;

      Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
      if ((a * x - b).cwiseAbs().maxCoeff() > kSystemResidualTol) continue;
      if (x.minCoeff() < -1e-12) continue;

      std::vector<double> probs(n, 0.0);
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double v = std::max(0.0, x(static_cast<Eigen::Index>(i)));
        probs[support[i]] = v;
        sum += v;
      }
      if (sum <= 0.0) continue;
      for (double& v : probs) v /= sum;

      Policy candidate{probs};
      bool off_ok = true;
      for (std::size_t i = 0; i < n && off_ok; ++i) {
        if (probs[i] > 0.0) continue;
        double payoff = 0.0;
        for (std::size_t j = 0; j < k; ++j)
          payoff += model(i, support[j]) * candidate[support[j]];
        if (payoff > 0.5 + tol) off_ok = false;
      }
      if (!off_ok) continue;

      double gap = duality_gap(candidate, model);
      if (gap <= tol)
        return NashResult{candidate, gap, NashMethod::kSupportEnumeration};
    } while (next_combination(support, n));
  }
  throw SolverFailure("solve_nash: no support admits a solution at tol " +
                      std::to_string(tol));
}

NashResult solve_regularized_nash(const RegularizedGame& game, double tol) {
  const double eta = game.tau / (game.tau * game.tau + 0.5);
  const double threshold = tol * eta * game.tau;
  Policy mu = game.reference;
  // Floating-point limit cycles of small period stand in for an exact fixed
  // point once the iterate can no longer be resolved in doubles.
  std::vector<std::vector<double>> recent;
  for (std::size_t k = 0; k < kFixedPointCap; ++k) {
    Policy next = prox(mu, scaled(reg_gradient(mu, game), eta));
    double resid = linf_distance(next, mu);
    bool cycle = next.probs() == mu.probs();
    for (const auto& past : recent)
      if (next.probs() == past) cycle = true;
    if (resid < threshold || cycle) {
      return NashResult{next, resid / (eta * game.tau), NashMethod::kFixedPoint};
    }
    recent.push_back(mu.probs());
    if (recent.size() > 4) recent.erase(recent.begin());
    mu = next;
  }
  throw SolverFailure("solve_regularized_nash: iteration cap exceeded");
}

}  // namespace prefgame
