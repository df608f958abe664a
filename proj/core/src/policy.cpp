#include "prefgame/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "prefgame/errors.hpp"

namespace prefgame {

namespace {

void floor_entries(std::vector<double>& v) {
  for (double& x : v) {
    if (x > 0.0 && x < kProbFloor) x = kProbFloor;
  }
}

}  // namespace

Policy::Policy(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw StructuralError("Policy: empty probability vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    double& x = probs_[i];
    if (!std::isfinite(x))
      throw DomainError("Policy: non-finite entry at index " + std::to_string(i));
    if (x < -1e-12)
      throw DomainError("Policy: negative entry at index " + std::to_string(i));
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (sum <= 0.0) throw DomainError("Policy: probabilities sum to zero");
  floor_entries(probs_);
  sum = 0.0;
  for (double x : probs_) sum += x;
  // Already-normalized input is kept bit-for-bit so that serialization
  // round-trips exactly.
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& x : probs_) x /= sum;
    floor_entries(probs_);
  }
}

Policy Policy::uniform(std::size_t n) {
  if (n == 0) throw StructuralError("Policy::uniform: n must be positive");
  return Policy(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Policy Policy::pure(std::size_t n, std::size_t index) {
  if (index >= n) throw StructuralError("Policy::pure: index out of range");
  std::vector<double> v(n, 0.0);
  v[index] = 1.0;
  return Policy(std::move(v));
}

double Policy::min_positive() const {
  double m = 1.0;
  for (double x : probs_)
    if (x > 0.0) m = std::min(m, x);
  return m;
}

std::size_t Policy::support_size() const {
  std::size_t k = 0;
  for (double x : probs_)
    if (x > 0.0) ++k;
  return k;
}

GradientVector::GradientVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty())
    throw StructuralError("GradientVector: empty vector");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw DomainError("GradientVector: non-finite entry at index " +
                        std::to_string(i));
  }
}

GradientVector scaled(const GradientVector& g, double factor) {
  std::vector<double> v = g.values();
  for (double& x : v) x *= factor;
  return GradientVector(std::move(v));
}

double kl_divergence(const Policy& p, const Policy& q) {
  if (p.size() != q.size())
    throw StructuralError("kl_divergence: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw DomainError("kl_divergence: support violation at index " +
                        std::to_string(i));
    total += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, total);
}

Policy prox(const Policy& reference, const GradientVector& g) {
  if (reference.size() != g.size())
    throw StructuralError("prox: dimension mismatch");
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (reference[i] > 0.0) m = std::max(m, g[i]);
  std::vector<double> out(reference.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (reference[i] > 0.0) out[i] = reference[i] * std::exp(g[i] - m);
  return Policy(std::move(out));
}

double three_point_check(const Policy& z, const GradientVector& g,
                         const Policy& z_prime, const Policy& z_star) {
  double lhs = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    lhs += g[i] * (z_star[i] - z_prime[i]);
  double rhs = kl_divergence(z_star, z) - kl_divergence(z_star, z_prime) -
               kl_divergence(z_prime, z);
  return rhs - lhs;
}

double linf_distance(const Policy& a, const Policy& b) {
  if (a.size() != b.size())
    throw StructuralError("linf_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double l1_distance(const Policy& a, const Policy& b) {
  if (a.size() != b.size())
    throw StructuralError("l1_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace prefgame
