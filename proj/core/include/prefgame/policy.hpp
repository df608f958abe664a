#pragma once

#include <cstddef>
#include <vector>

namespace prefgame {

// Probabilities strictly below this are raised to it at construction; exact
// zeros are preserved so that restricted supports stay meaningful.
inline constexpr double kProbFloor = 1e-15;

// A probability vector over a finite response set. Entries are non-negative,
// sum to one within 1e-12, and positive entries are at least kProbFloor.
class Policy {
 public:
  explicit Policy(std::vector<double> probs);

  static Policy uniform(std::size_t n);
  static Policy pure(std::size_t n, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  double min_positive() const;
  std::size_t support_size() const;

 private:
  std::vector<double> probs_;
};

// A vector of payoff/advantage values over the response set; entries checked
// finite at construction.
class GradientVector {
 public:
  explicit GradientVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

GradientVector scaled(const GradientVector& g, double factor);

// sum_y p(y) log(p(y)/q(y)), natural log; terms with p(y)=0 contribute 0.
// Throws DomainError naming the offending index if q(y)=0 < p(y).
double kl_divergence(const Policy& p, const Policy& q);

// Entropic gradient step: returns the policy proportional to
// reference(y) * exp(g(y)), stabilised by max-subtraction. Any step size is
// expected to be folded into g by the caller. Support equals the
// reference's support.
Policy prox(const Policy& reference, const GradientVector& g);

// Slack of the three-point inequality for z' = prox(z, g):
//   <g, z* - z'> <= KL(z*||z) - KL(z*||z') - KL(z'||z).
// Returns RHS - LHS; non-negative up to rounding. Test utility.
double three_point_check(const Policy& z, const GradientVector& g,
                         const Policy& z_prime, const Policy& z_star);

double linf_distance(const Policy& a, const Policy& b);
double l1_distance(const Policy& a, const Policy& b);

}  // namespace prefgame
