#pragma once

#include "cocom/core.hpp"
#include "cocom/penalty.hpp"

namespace cocom {

// grad f_hat + phi' * grad g_hat^+, with grad g_hat^+ = 0 when g_hat <= 0
Vec surrogate_gradient(const Vec& grad_f_hat, double g_hat, const Vec& grad_g_hat, double phi_prime);

// ||X|| / (sqrt(2) * sqrt(sum of squared gradient norms)); 0 before any nonzero gradient
double adaptive_step(double diam, double grad_sq_sum);

// Penalty-based online gradient descent on the memory-less surrogate.
class OgdLearner {
 public:
  struct Params {
    ProblemVariant variant = ProblemVariant::CocoM2;
    Penalty::Kind penalty = Penalty::Kind::Quadratic;
    LambdaSchedule lambda;
  };

  OgdLearner(FeasibleSet set, int m, Params params);

  const DecisionVector& x() const { return x_; }
  double grad_sq_sum() const { return grad_sq_sum_; }
  double V() const { return v_hat_; }
  const FeasibleSet& set() const { return set_; }
  int memory() const { return m_; }

  // One round at time t. `window` must end with x().
  RoundRecord round(int t, const MemoryFunctionOracle& f, const MemoryFunctionOracle& g, const MemoryWindow& window);

 private:
  FeasibleSet set_;
  int m_;
  Params params_;
  DecisionVector x_;
  double grad_sq_sum_ = 0.0;
  double v_hat_ = 0.0;
};

}  // namespace cocom
