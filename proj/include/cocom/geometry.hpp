#pragma once

#include "cocom/core.hpp"

namespace cocom {

// r(x) = 0.5 * ||x - center||^2
struct Regularizer {
  DecisionVector center;
  double r_max = 0.0;  // max of r over the feasible set

  static Regularizer for_set(const FeasibleSet& set);
  double value(const DecisionVector& x) const { return 0.5 * norm_sq(sub(x, center)); }
};

DecisionVector project(const FeasibleSet& set, const DecisionVector& p);

// argmin_{x in set} <g, x> + mu * r(x), exact for boxes and balls.
DecisionVector ftrl_argmin(const FeasibleSet& set, const Vec& g, double mu, const Regularizer& r);

// argmin_{x in set} <g, x>; ties resolved to the center coordinate.
DecisionVector linear_min(const FeasibleSet& set, const Vec& g);

}  // namespace cocom
