#include "cocom/penalty_ogd.hpp"

#include <algorithm>
#include <cmath>

#include "cocom/geometry.hpp"

namespace cocom {

Vec surrogate_gradient(const Vec& grad_f_hat, double g_hat, const Vec& grad_g_hat, double phi_prime) {
  Vec grad = grad_f_hat;
  if (g_hat > 0.0) axpy(phi_prime, grad_g_hat, grad);
  return grad;
}

double adaptive_step(double diam, double grad_sq_sum) {
  if (grad_sq_sum <= 0.0) return 0.0;
  return diam / (std::sqrt(2.0) * std::sqrt(grad_sq_sum));
}

OgdLearner::OgdLearner(FeasibleSet set, int m, Params params)
    : set_(std::move(set)), m_(m), params_(params), x_(set_.center()) {
  if (m < 0) throw ConfigError("OgdLearner: negative memory");
}

RoundRecord OgdLearner::round(int t, const MemoryFunctionOracle& f, const MemoryFunctionOracle& g,
                              const MemoryWindow& window) {
  if (f.dim() != set_.dim() || g.dim() != set_.dim() || f.memory() != m_ || g.memory() != m_ ||
      window.memory() != m_ || window.dim() != set_.dim())
    throw ConfigError("ogd round: oracle or window shape does not match the learner");
  if (window.newest() != x_) throw ContractViolation("ogd round: window must end with the current decision");

  RoundRecord rec;
  rec.t = t;
  rec.x = x_;
  rec.f_mem = f.value(window);
  rec.g_mem = g.value(window);
  rec.g_plus_true = std::max(0.0, rec.g_mem);

  // dual update before the gradient, so phi' sees this round's violation
  double g_hat = g.value_splat(x_);
  rec.g_lift = g_hat;
  rec.g_plus_recorded = std::max(0.0, g_hat);
  v_hat_ += rec.g_plus_recorded;
  rec.V = v_hat_;

  Penalty pen(params_.penalty, params_.lambda.at(t));
  rec.lambda = pen.lambda();
  rec.phi_prime = pen.prime(v_hat_);
  rec.saturated = pen.saturates(v_hat_);

  rec.f_lift = f.value_splat(x_);
  rec.surrogate = rec.f_lift + rec.phi_prime * rec.g_plus_recorded;
  Vec grad = surrogate_gradient(f.grad_splat(x_), g_hat, g.grad_splat(x_), rec.phi_prime);
  double gsq = norm_sq(grad);
  rec.grad_norm = std::sqrt(gsq);
  grad_sq_sum_ += gsq;
  double eta = adaptive_step(set_.diameter(), grad_sq_sum_);
  rec.eta_or_mu = eta;

  Vec next = x_;
  axpy(-eta, grad, next);
  x_ = project(set_, next);
  if (!all_finite(x_)) throw ContractViolation("ogd round: non-finite decision");
  return rec;
}

}  // namespace cocom
