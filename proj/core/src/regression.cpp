#include "prefgame/regression.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>

#include "prefgame/errors.hpp"

namespace prefgame {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

std::vector<double> log_softmax(const std::vector<double>& theta) {
  double m = *std::max_element(theta.begin(), theta.end());
  double z = 0.0;
  for (double t : theta) z += std::exp(t - m);
  double lse = m + std::log(z);
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - lse;
  return out;
}

struct LossEval {
  double value;
  std::vector<double> dh;  // derivative w.r.t. the log-policy
};

// All losses are functions of the log-policy h = log softmax(theta); the
// theta-gradient is dh - sum(dh) * pi.
class LossFunction {
 public:
  LossFunction(const RegressionSpec& spec) : spec_(spec) {
    n_ = spec.reference.size();
    const Policy& mu = spec.anchor ? *spec.anchor : spec.reference;
    weights_ = mu.probs();
    log_ref_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      log_ref_[i] = spec.reference[i] > 0.0 ? std::log(spec.reference[i]) : 0.0;
    if (spec.loss == LossKind::kInpo) {
      // Pairwise base eta*tau*log(ref) + (1-eta*tau)*log(mu).
      base_.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        double lmu = mu[i] > 0.0 ? std::log(mu[i]) : 0.0;
        base_[i] = spec.eta * spec.tau * log_ref_[i] +
                   (1.0 - spec.eta * spec.tau) * lmu;
      }
    } else {
      base_ = log_ref_;
    }
  }

  std::size_t size() const { return n_; }

  LossEval eval(const std::vector<double>& h, double v_phi) const {
    switch (spec_.loss) {
      case LossKind::kIpo:
      case LossKind::kInpo:
        return pair_square(h);
      case LossKind::kDpo:
        return dpo(h);
      case LossKind::kSppo:
        return pointwise_square(h, spec_.eta / 2.0, 0.0);
      case LossKind::kDro:
        return pointwise_square(h, 0.0, spec_.eta * v_phi);
      case LossKind::kRebel:
        return rebel(h);
    }
    throw StructuralError("unknown loss");
  }

  // Hessian of the loss in the log-policy h (exact for the pair losses,
  // Gauss-Newton for the pointwise ones); used by the stiff-tail rescue
  // direction. Row-major n x n.
  std::vector<double> hessian_h(const std::vector<double>& h) const {
    std::vector<double> H(n_ * n_, 0.0);
    auto add_pair = [&](std::size_t w, std::size_t l, double v) {
      H[w * n_ + w] += v;
      H[l * n_ + l] += v;
      H[w * n_ + l] -= v;
      H[l * n_ + w] -= v;
    };
    switch (spec_.loss) {
      case LossKind::kIpo:
      case LossKind::kInpo: {
        const PairWeights& W = *spec_.pairs;
        for (std::size_t w = 0; w < n_; ++w)
          for (std::size_t l = 0; l < n_; ++l)
            if (W.at(w, l) != 0.0) add_pair(w, l, 2.0 * W.at(w, l));
        break;
      }
      case LossKind::kDpo: {
        const PairWeights& W = *spec_.pairs;
        const double beta = 1.0 / spec_.eta;
        for (std::size_t w = 0; w < n_; ++w)
          for (std::size_t l = 0; l < n_; ++l) {
            double wt = W.at(w, l);
            if (wt == 0.0) continue;
            double d = beta * ((h[w] - base_[w]) - (h[l] - base_[l]));
            double sp = 1.0 / (1.0 + std::exp(-std::abs(d)));
            double curv = beta * beta * wt * sp * (1.0 - sp);
            add_pair(w, l, curv);
          }
        break;
      }
      case LossKind::kSppo:
      case LossKind::kDro:
        for (std::size_t y = 0; y < n_; ++y)
          H[y * n_ + y] = 2.0 * weights_[y];
        break;
      case LossKind::kRebel: {
        for (std::size_t y = 0; y < n_; ++y)
          for (std::size_t y2 = 0; y2 < n_; ++y2) {
            double wt = weights_[y] * weights_[y2];
            if (wt != 0.0)
              add_pair(y, y2, 2.0 * wt / (spec_.eta * spec_.eta));
          }
        break;
      }
    }
    return H;
  }

  // Closed-form normalization scalar for DRO: mean residual over weights.
  double optimal_v(const std::vector<double>& h) const {
    const auto& g = spec_.targets->values();
    double num = 0.0, den = 0.0;
    for (std::size_t y = 0; y < n_; ++y) {
      if (weights_[y] == 0.0) continue;
      num += weights_[y] * (h[y] - base_[y] - spec_.eta * g[y]);
      den += weights_[y];
    }
    return num / (spec_.eta * den);
  }

 private:
  // (s(w) - s(l) - eta/2)^2 over pair weights, s = h - base.
  LossEval pair_square(const std::vector<double>& h) const {
    const PairWeights& W = *spec_.pairs;
    const double target = spec_.eta / 2.0;
    double loss = 0.0;
    std::vector<double> dh(n_, 0.0);
    for (std::size_t w = 0; w < n_; ++w) {
      for (std::size_t l = 0; l < n_; ++l) {
        double wt = W.at(w, l);
        if (wt == 0.0) continue;
        double d = (h[w] - base_[w]) - (h[l] - base_[l]) - target;
        loss += wt * d * d;
        dh[w] += 2.0 * wt * d;
        dh[l] -= 2.0 * wt * d;
      }
    }
    return {loss, std::move(dh)};
  }

  LossEval dpo(const std::vector<double>& h) const {
    const PairWeights& W = *spec_.pairs;
    const double beta = 1.0 / spec_.eta;
    double loss = 0.0;
    std::vector<double> dh(n_, 0.0);
    for (std::size_t w = 0; w < n_; ++w) {
      for (std::size_t l = 0; l < n_; ++l) {
        double wt = W.at(w, l);
        if (wt == 0.0) continue;
        double d = beta * ((h[w] - base_[w]) - (h[l] - base_[l]));
        // -log sigmoid(d), stable on both tails
        loss += wt * (d > 0.0 ? std::log1p(std::exp(-d))
                              : -d + std::log1p(std::exp(d)));
        double s = d > 0.0 ? std::exp(-d) / (1.0 + std::exp(-d))
                           : 1.0 / (1.0 + std::exp(d));  // sigmoid(-d)
        dh[w] -= beta * wt * s;
        dh[l] += beta * wt * s;
      }
    }
    return {loss, std::move(dh)};
  }

  // (h - base - eta*g + shift - offset)^2 weighted pointwise.
  LossEval pointwise_square(const std::vector<double>& h, double shift,
                            double offset) const {
    const auto& g = spec_.targets->values();
    double loss = 0.0;
    std::vector<double> dh(n_, 0.0);
    for (std::size_t y = 0; y < n_; ++y) {
      double wt = weights_[y];
      if (wt == 0.0) continue;
      double r = h[y] - base_[y] - spec_.eta * g[y] + shift - offset;
      loss += wt * r * r;
      dh[y] = 2.0 * wt * r;
    }
    return {loss, std::move(dh)};
  }

  // ((s(y)-s(y'))/eta - (g(y)-g(y')))^2 over independent draw pairs.
  LossEval rebel(const std::vector<double>& h) const {
    const auto& g = spec_.targets->values();
    double loss = 0.0;
    std::vector<double> dh(n_, 0.0);
    for (std::size_t y = 0; y < n_; ++y) {
      for (std::size_t y2 = 0; y2 < n_; ++y2) {
        double wt = weights_[y] * weights_[y2];
        if (wt == 0.0) continue;
        double d = ((h[y] - base_[y]) - (h[y2] - base_[y2])) / spec_.eta -
                   (g[y] - g[y2]);
        loss += wt * d * d;
        dh[y] += 2.0 * wt * d / spec_.eta;
        dh[y2] -= 2.0 * wt * d / spec_.eta;
      }
    }
    return {loss, std::move(dh)};
  }

  const RegressionSpec& spec_;
  std::size_t n_;
  std::vector<double> weights_;
  std::vector<double> log_ref_;
  std::vector<double> base_;
};

void validate_spec(const RegressionSpec& spec) {
  const std::size_t n = spec.reference.size();
  if (!(spec.eta > 0.0)) throw DomainError("RegressionSpec: eta must be positive");
  if (spec.anchor && spec.anchor->size() != n)
    throw StructuralError("RegressionSpec: anchor size mismatch");
  bool pair_loss = spec.loss == LossKind::kDpo || spec.loss == LossKind::kIpo ||
                   spec.loss == LossKind::kInpo;
  if (pair_loss) {
    if (!spec.pairs) throw StructuralError("RegressionSpec: pair data required");
    if (spec.pairs->size() != n)
      throw StructuralError("RegressionSpec: pair weight size mismatch");
  } else {
    if (!spec.targets)
      throw StructuralError("RegressionSpec: win-rate targets required");
    if (spec.targets->size() != n)
      throw StructuralError("RegressionSpec: target size mismatch");
  }
  if (spec.loss == LossKind::kInpo) {
    if (!(spec.tau > 0.0)) throw DomainError("RegressionSpec: INPO needs tau > 0");
    if (!spec.anchor) throw StructuralError("RegressionSpec: INPO needs an anchor");
  }
}

struct ThetaEval {
  double f;
  std::vector<double> grad;  // gauge component 0 excluded from stepping
};

// Gauge-reduced (Gauss-)Newton direction d solving H d = grad over the free
// coordinates, with H = J^T H_h J for J = dh/dtheta = I - 1 pi^T. Returns an
// empty vector when the system is unusable.
std::vector<double> newton_direction(const LossFunction& lf,
                                     const std::vector<double>& theta,
                                     const std::vector<double>& grad) {
  const std::size_t n = theta.size();
  std::vector<double> h = log_softmax(theta);
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = std::exp(h[i]);
  std::vector<double> hh = lf.hessian_h(h);

  Eigen::MatrixXd jac(n, n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t j = 0; j < n; ++j)
      jac(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(j)) =
          (y == j ? 1.0 : 0.0) - pi[j];
  Eigen::MatrixXd hmat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      hmat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          hh[i * n + j];
  Eigen::MatrixXd ht = jac.transpose() * hmat * jac;

  const Eigen::Index m = static_cast<Eigen::Index>(n) - 1;
  Eigen::MatrixXd reduced = ht.bottomRightCorner(m, m);
  double ridge = 1e-14 * std::max(1e-300, reduced.diagonal().maxCoeff());
  reduced += ridge * Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i)
    rhs(i) = grad[static_cast<std::size_t>(i) + 1];
  Eigen::LDLT<Eigen::MatrixXd> solver(reduced);
  if (solver.info() != Eigen::Success) return {};
  Eigen::VectorXd d = solver.solve(rhs);
  if (!d.allFinite()) return {};
  std::vector<double> out(n, 0.0);
  for (Eigen::Index i = 0; i < m; ++i)
    out[static_cast<std::size_t>(i) + 1] = d(i);
  return out;
}

ThetaEval eval_theta(const LossFunction& lf, const RegressionSpec& spec,
                     const std::vector<double>& theta, double& v_phi) {
  std::vector<double> h = log_softmax(theta);
  if (spec.loss == LossKind::kDro) v_phi = lf.optimal_v(h);
  LossEval le = lf.eval(h, v_phi);
  double dh_sum = 0.0;
  for (double d : le.dh) dh_sum += d;
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    grad[i] = le.dh[i] - dh_sum * std::exp(h[i]);
  return {le.value, std::move(grad)};
}

}  // namespace

LogitParams::LogitParams(std::vector<double> logits_in)
    : logits(std::move(logits_in)) {
  if (logits.empty()) throw StructuralError("LogitParams: empty");
  for (double v : logits)
    if (!std::isfinite(v)) throw DomainError("LogitParams: non-finite logit");
  double g0 = logits[0];
  for (double& v : logits) v -= g0;
}

LogitParams LogitParams::from_policy(const Policy& p) {
  std::vector<double> logits(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    logits[i] = std::log(std::max(p[i], kProbFloor));
  return LogitParams(std::move(logits));
}

Policy LogitParams::to_policy() const {
  std::vector<double> h = log_softmax(logits);
  for (double& x : h) x = std::exp(x);
  return Policy(std::move(h));
}

PairWeights PairWeights::population(const Policy& mu,
                                    const PreferenceModel& model) {
  if (mu.size() != model.size())
    throw StructuralError("PairWeights: dimension mismatch");
  const std::size_t n = mu.size();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    w[i * n + i] = mu[i] * mu[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      w[i * n + j] = 2.0 * mu[i] * mu[j] * model(i, j);
    }
  }
  return PairWeights(n, std::move(w));
}

PairWeights PairWeights::empirical(std::size_t n,
                                   const std::vector<PreferenceSample>& samples) {
  if (samples.empty()) throw DomainError("PairWeights: empty sample list");
  std::vector<double> w(n * n, 0.0);
  for (const auto& s : samples) {
    if (s.winner >= n || s.loser >= n)
      throw StructuralError("PairWeights: sample index out of range");
    w[s.winner * n + s.loser] += 1.0;
  }
  for (double& x : w) x /= static_cast<double>(samples.size());
  return PairWeights(n, std::move(w));
}

RegressionResult minimize(const RegressionSpec& spec, const LogitParams& init) {
  validate_spec(spec);
  const std::size_t n = spec.reference.size();
  if (init.logits.size() != n)
    throw StructuralError("minimize: init size mismatch");
  const bool boxed = spec.loss == LossKind::kDpo;
  const double cap = spec.optimizer.logit_cap;

  LossFunction lf(spec);
  std::vector<double> theta = init.logits;
  if (boxed)
    for (double& t : theta) t = std::clamp(t, -cap, cap);
  theta[0] = 0.0;

  double v_phi = 0.0;
  ThetaEval cur = eval_theta(lf, spec, theta, v_phi);

  auto projected_norm = [&](const std::vector<double>& th,
                            const std::vector<double>& grad) {
    double norm = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      double g = grad[i];
      if (boxed) {
        if (th[i] >= cap && g < 0.0) g = 0.0;
        if (th[i] <= -cap && g > 0.0) g = 0.0;
      }
      norm = std::max(norm, std::abs(g));
    }
    return norm;
  };

  std::vector<double> prev_theta, prev_grad;
  double step = 1.0;
  std::size_t steps = 0;
  for (; steps < spec.optimizer.max_steps; ++steps) {
    double pnorm = projected_norm(theta, cur.grad);
    if (pnorm <= spec.optimizer.gradient_tolerance) break;

    if (!prev_theta.empty()) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        double dt = theta[i] - prev_theta[i];
        double dg = cur.grad[i] - prev_grad[i];
        num += dt * dg;
        den += dg * dg;
      }
      if (den > 0.0 && std::isfinite(num)) {
        double bb = std::abs(num) / den;
        if (bb > 0.0 && std::isfinite(bb)) step = bb;
      }
    }
    step = std::clamp(step, 1e-12, 1e16);

    bool accepted = false;
    std::vector<double> cand(n);
    // Near the optimum the decrease falls below the resolution of f; in that
    // regime take whichever candidate shrinks the gradient the most without
    // a resolvable increase of f.
    const double noise_band = 4e-12 * (std::abs(cur.f) + 1e-12);
    double best_cpn = std::numeric_limits<double>::infinity();
    std::vector<double> best_theta;
    ThetaEval best_eval{0.0, {}};
    double best_v = v_phi;

    auto consider = [&](const std::vector<double>& c) -> bool {
      double descent = 0.0;
      for (std::size_t i = 1; i < n; ++i)
        descent += cur.grad[i] * (theta[i] - c[i]);
      if (descent <= 0.0) return false;
      double cand_v = v_phi;
      ThetaEval ce = eval_theta(lf, spec, c, cand_v);
      if (ce.f <= cur.f - kArmijo * descent) {
        accepted = true;
        prev_theta = theta;
        prev_grad = cur.grad;
        theta = c;
        cur = std::move(ce);
        v_phi = cand_v;
        return true;
      }
      if (ce.f <= cur.f + noise_band) {
        double cpn = projected_norm(c, ce.grad);
        if (cpn < best_cpn) {
          best_cpn = cpn;
          best_theta = c;
          best_eval = std::move(ce);
          best_v = cand_v;
        }
      }
      return false;
    };

    double s = step;
    for (int bt = 0; bt < kMaxBacktracks && !accepted; ++bt) {
      cand[0] = 0.0;
      bool moved = false;
      for (std::size_t i = 1; i < n; ++i) {
        double t = theta[i] - s * cur.grad[i];
        if (boxed) t = std::clamp(t, -cap, cap);
        cand[i] = t;
        if (t != theta[i]) moved = true;
      }
      if (!moved) break;
      consider(cand);
      s *= 0.5;
    }
    // Curvature-scaled rescue for very uneven coordinate scales, where the
    // raw gradient direction cannot make representable progress.
    if (!accepted) {
      std::vector<double> d = newton_direction(lf, theta, cur.grad);
      if (!d.empty()) {
        for (double damp : {1.0, 0.25, 0.0625}) {
          cand[0] = 0.0;
          for (std::size_t i = 1; i < n; ++i) {
            double t = theta[i] - damp * d[i];
            if (boxed) t = std::clamp(t, -cap, cap);
            cand[i] = t;
          }
          if (cand == theta) continue;
          if (consider(cand)) break;
        }
      }
    }
    if (!accepted && best_cpn <= 0.999 * pnorm) {
      accepted = true;
      prev_theta = theta;
      prev_grad = cur.grad;
      theta = best_theta;
      cur = std::move(best_eval);
      v_phi = best_v;
    }
    if (!accepted) break;  // no representable progress left
  }

  double final_norm = projected_norm(theta, cur.grad);
  if (final_norm > spec.optimizer.gradient_tolerance) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "minimize: gradient norm %.3e above tolerance after %zu steps",
                  final_norm, steps);
    throw SolverFailure(msg);
  }
  bool capped = false;
  if (boxed)
    for (std::size_t i = 1; i < n; ++i)
      if (theta[i] >= cap || theta[i] <= -cap) capped = true;
  LogitParams out(theta);
  return RegressionResult{out.to_policy(), out,      capped,
                          steps,           final_norm, v_phi};
}

double population_loss(const RegressionSpec& spec, const Policy& candidate) {
  validate_spec(spec);
  if (candidate.size() != spec.reference.size())
    throw StructuralError("population_loss: dimension mismatch");
  if (candidate.support_size() != candidate.size())
    throw DomainError("population_loss: candidate must have full support");
  LossFunction lf(spec);
  std::vector<double> h(candidate.size());
  for (std::size_t i = 0; i < candidate.size(); ++i)
    h[i] = std::log(candidate[i]);
  double v_phi = 0.0;
  if (spec.loss == LossKind::kDro) v_phi = lf.optimal_v(h);
  return lf.eval(h, v_phi).value;
}

}  // namespace prefgame
