#include "cocom/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace cocom {

Regularizer Regularizer::for_set(const FeasibleSet& set) {
  Regularizer r;
  r.center = set.center();
  double rad = set.max_radius();
  r.r_max = 0.5 * rad * rad;
  return r;
}

DecisionVector project(const FeasibleSet& set, const DecisionVector& p) {
  if (p.size() != set.dim()) throw ContractViolation("project: dimension mismatch");
  if (set.kind() == FeasibleSet::Kind::Box) {
    Vec x(p);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], set.lo()[i], set.hi()[i]);
    return x;
  }
  Vec diff = sub(p, set.ball_center());
  double n = norm(diff);
  if (n <= set.radius()) return p;
  Vec x = set.ball_center();
  axpy(set.radius() / n, diff, x);
  return x;
}

DecisionVector linear_min(const FeasibleSet& set, const Vec& g) {
  if (g.size() != set.dim()) throw ContractViolation("linear_min: dimension mismatch");
  if (set.kind() == FeasibleSet::Kind::Box) {
    Vec x = set.center();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (g[i] > 0.0) x[i] = set.lo()[i];
      else if (g[i] < 0.0) x[i] = set.hi()[i];
    }
    return x;
  }
  double n = norm(g);
  Vec x = set.ball_center();
  if (n > 0.0) axpy(-set.radius() / n, g, x);
  return x;
}

DecisionVector ftrl_argmin(const FeasibleSet& set, const Vec& g, double mu, const Regularizer& r) {
  if (g.size() != set.dim() || r.center.size() != set.dim())
    throw ContractViolation("ftrl_argmin: dimension mismatch");
  if (mu < 0.0 || !std::isfinite(mu)) throw ContractViolation("ftrl_argmin: mu must be finite and >= 0");
  if (mu == 0.0) return linear_min(set, g);
  // completing the square: the objective is mu/2 * ||x - (center - g/mu)||^2 + const
  Vec x = r.center;
  axpy(-1.0 / mu, g, x);
  return project(set, x);
}

}  // namespace cocom
