#include "cocom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cocom/optimistic.hpp"

namespace cocom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void grid_axis(double lo, double hi, double res, std::vector<double>& out) {
  out.clear();
  std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / res));
  for (std::size_t k = 0; k <= n; ++k) out.push_back(std::min(hi, lo + static_cast<double>(k) * res));
}

struct Interval {
  double lo, hi;
  bool ok() const { return lo <= hi; }
};

// tighten [lo, hi] with b * x + o <= 0
void cut(Interval& iv, double b, double o) {
  if (b > 0.0) iv.hi = std::min(iv.hi, -o / b);
  else if (b < 0.0) iv.lo = std::max(iv.lo, -o / b);
  else if (o > 0.0) iv.lo = std::numeric_limits<double>::infinity();
}

double linear_argmin(const Interval& iv, double A) {
  if (A > 0.0) return iv.lo;
  if (A < 0.0) return iv.hi;
  return std::clamp(0.0, iv.lo, iv.hi);
}

}  // namespace

Benchmark grid_benchmark(const FeasibleSet& set, double resolution, const Objective& objective,
                         const Membership& feasible) {
  if (!(resolution > 0.0)) throw ConfigError("grid benchmark: resolution must be positive");
  const std::size_t d = set.dim();
  if (d > 2) throw ConfigError("grid benchmark: only d <= 2 is supported");
  Vec lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (set.kind() == FeasibleSet::Kind::Box) {
      lo[i] = set.lo()[i];
      hi[i] = set.hi()[i];
    } else {
      lo[i] = set.ball_center()[i] - set.radius();
      hi[i] = set.ball_center()[i] + set.radius();
    }
  }
  Benchmark best;
  best.total = std::numeric_limits<double>::infinity();
  std::vector<double> ax, ay{0.0};
  grid_axis(lo[0], hi[0], resolution, ax);
  if (d == 2) grid_axis(lo[1], hi[1], resolution, ay);
  Vec x(d);
  for (double yv : ay) {
    for (double xv : ax) {
      x[0] = xv;
      if (d == 2) x[1] = yv;
      if (!set.contains(x) || !feasible(x)) continue;
      double v = objective(x);
      if (v < best.total) {
        best.total = v;
        best.x_star = x;
        best.feasible = true;
      }
    }
  }
  if (!best.feasible) best.total = kNaN;
  return best;
}

Benchmark closed_form_benchmark(const AppendixAInstance& inst, int t_end) {
  if (inst.dim() != 1) throw ConfigError("closed-form benchmark needs d = 1");
  const auto& p = inst.params();
  t_end = std::min(t_end, p.T);
  Interval iv{-p.R, p.R};
  double csum = 0.0;
  for (int t = p.m; t <= t_end; ++t) {
    cut(iv, inst.d(t)[0], -p.delta);
    csum += inst.c(t)[0];
  }
  Benchmark b;
  if (!iv.ok() || t_end < p.m) {
    b.total = kNaN;
    return b;
  }
  double mean = csum / (t_end - p.m + 1);
  b.feasible = true;
  b.x_star = {std::clamp(mean, iv.lo, iv.hi)};
  b.total = inst.lifted_loss_total(b.x_star, t_end);
  return b;
}

Benchmark closed_form_benchmark(const SeparableInstance& inst, int t_end) {
  if (inst.dim() != 1) throw ConfigError("closed-form benchmark needs d = 1");
  const double w = inst.params().half_width;
  t_end = std::min(t_end, inst.T());
  Interval iv{-w, w};
  double A = 0.0;
  for (int t = inst.m() + 1; t <= t_end; ++t) {
    for (int i = 0; i <= inst.m(); ++i) {
      cut(iv, inst.g_slice(t, i).coeff[0], inst.g_slice(t, i).offset);
      A += inst.f_slice(t, i).coeff[0];
    }
  }
  Benchmark b;
  if (!iv.ok()) {
    b.total = kNaN;
    return b;
  }
  b.feasible = true;
  b.x_star = {linear_argmin(iv, A)};
  b.total = inst.lifted_loss_total(b.x_star, t_end);
  return b;
}

std::vector<double> prefix_benchmarks(const AppendixAInstance& inst) {
  if (inst.dim() != 1) throw ConfigError("prefix benchmarks need d = 1");
  const auto& p = inst.params();
  std::vector<double> out;
  Interval iv{-p.R, p.R};
  double csum = 0.0;
  for (int t = p.m; t <= p.T; ++t) {
    cut(iv, inst.d(t)[0], -p.delta);
    csum += inst.c(t)[0];
    if (!iv.ok()) {
      out.push_back(kNaN);
      continue;
    }
    Vec x{std::clamp(csum / (t - p.m + 1), iv.lo, iv.hi)};
    out.push_back(inst.lifted_loss_total(x, t));
  }
  return out;
}

std::vector<double> prefix_benchmarks(const SeparableInstance& inst, int first_round) {
  if (inst.dim() != 1) throw ConfigError("prefix benchmarks need d = 1");
  const double w = inst.params().half_width;
  std::vector<double> out;
  Interval iv{-w, w};
  double A = 0.0, O = 0.0;
  for (int t = first_round; t <= inst.T(); ++t) {
    if (t > inst.m()) {
      for (int i = 0; i <= inst.m(); ++i) {
        cut(iv, inst.g_slice(t, i).coeff[0], inst.g_slice(t, i).offset);
        A += inst.f_slice(t, i).coeff[0];
        O += inst.f_slice(t, i).offset;
      }
    }
    if (!iv.ok()) {
      out.push_back(kNaN);
      continue;
    }
    out.push_back(A * linear_argmin(iv, A) + O);
  }
  return out;
}

Benchmark best_in_hindsight(const AppendixAInstance& inst, double resolution) {
  if (inst.dim() == 1) return closed_form_benchmark(inst, inst.T());
  return grid_benchmark(
      inst.set(), resolution, [&](const Vec& x) { return inst.lifted_loss_total(x, inst.T()); },
      [&](const Vec& x) { return inst.benchmark_feasible(x, inst.T()); });
}

Benchmark best_in_hindsight(const SeparableInstance& inst, double resolution) {
  if (inst.dim() == 1) return closed_form_benchmark(inst, inst.T());
  return grid_benchmark(
      inst.set(), resolution, [&](const Vec& x) { return inst.lifted_loss_total(x, inst.T()); },
      [&](const Vec& x) { return inst.benchmark_feasible(x, inst.T()); });
}

RegretSeries regret_and_ccv(const RunTrace& trace) {
  RegretSeries out;
  const std::size_t n = trace.rounds.size();
  out.static_cum.reserve(n);
  out.perround_cum.reserve(n);
  out.ccv_cum.reserve(n);
  double cum_f = 0.0, cum_lift = 0.0, cum_pr = 0.0, dev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = trace.rounds[k];
    cum_f += r.f_mem;
    cum_lift += r.f_lift;
    dev += r.f_mem - r.f_lift;
    out.ccv += r.g_plus_true;
    double pb = k < trace.prefix_benchmark.size() ? trace.prefix_benchmark[k] : kNaN;
    double pr = k < trace.per_round_min.size() ? trace.per_round_min[k] : kNaN;
    cum_pr += r.f_mem - pr;
    out.static_cum.push_back(cum_f - pb);
    out.perround_cum.push_back(cum_pr);
    out.ccv_cum.push_back(out.ccv);
  }
  out.benchmark_feasible = trace.benchmark.feasible;
  out.R_mc = cum_f - trace.benchmark.total;
  out.R_hat_c = cum_lift - trace.benchmark.total;
  out.memory_deviation = dev;
  return out;
}

bool thm3_condition(int T, int m) {
  if (T < 2) return false;
  double lt = std::log(static_cast<double>(T));
  return m <= std::pow(static_cast<double>(T), 1.0 / 6.0) / std::cbrt(lt);
}

double memory_term(int T, int m, double L, double diam, double L_f, double L_g) {
  double Td = T;
  double m15 = std::pow(static_cast<double>(m), 1.5);
  return m15 * L * (diam / std::sqrt(2.0)) * std::sqrt(Td) *
         std::sqrt(std::log(Td) + 2.0 * std::log(L_f + std::sqrt(Td) * L_g));
}

BoundReport theoretical_bounds(const BoundInputs& in) {
  BoundReport r;
  const double T = in.T;
  const double X = in.k.diam, Lf = in.k.L_f, Lg = in.k.L_g, F = in.k.F;
  r.lambda = in.lambda;
  if (in.penalty == Penalty::Kind::Quadratic) {
    r.theorem = in.variant == ProblemVariant::CocoM2 ? "thm1" : "thm2";
    double phi_m = in.lambda * in.v_hat_m * in.v_hat_m;
    r.regret_rhs = std::sqrt(2.0 * T) * X * Lf + 2.0 * std::sqrt(T) * X * X * Lg * Lg + phi_m +
                   memory_term(in.T, in.m, Lf, X, Lf, Lg);
    double v_hat = std::sqrt(2.0 * T * X * X * Lg * Lg + T * std::sqrt(2.0) * X * Lf + 2.0 * F * std::pow(T, 1.5)) +
                   std::sqrt(2.0 * T) * X * Lg;
    if (in.variant == ProblemVariant::CocoM) {
      r.ccv_rhs = v_hat;
      r.ccv_rhs_printed = v_hat;
    } else {
      double mem = memory_term(in.T, in.m, Lg, X, Lf, Lg);
      r.ccv_rhs = v_hat + mem;
      r.ccv_rhs_printed = v_hat - std::sqrt(2.0 * T) * X * Lg + std::sqrt(2.0 * T) * X + mem;
    }
    return r;
  }
  if (in.variant == ProblemVariant::CocoM) {
    r.theorem = "thm3";
    r.precondition_ok = thm3_condition(in.T, in.m);
    double m15 = std::pow(static_cast<double>(in.m), 1.5);
    r.regret_rhs = std::sqrt(2.0 * T) * X * Lf + m15 * Lf * (X / std::sqrt(2.0)) * std::sqrt(T * std::log(T)) +
                   std::exp(in.lambda * in.v_hat_m) + m15 * Lf * X * std::sqrt(std::max(0.0, std::log(Lf)));
    // exp(lambda V) / 2 <= A + 2FT + exp(lambda V_m); the printed form drops the 2 and the constant
    double A = X * Lf * std::sqrt(2.0 * T) + 2.0 * F * T;
    r.ccv_rhs = (1.0 / in.lambda) * std::log(2.0 * (A + std::exp(in.lambda * in.v_hat_m)));
    r.ccv_rhs_printed = (1.0 / in.lambda) * std::log(A);
    return r;
  }
  r.theorem = "none";
  r.precondition_ok = false;
  r.regret_rhs = r.ccv_rhs = r.ccv_rhs_printed = std::numeric_limits<double>::infinity();
  return r;
}

nlohmann::json BoundReport::to_json() const {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {{"theorem", theorem},
          {"precondition_ok", precondition_ok},
          {"lambda", num(lambda)},
          {"regret_rhs", num(regret_rhs)},
          {"ccv_rhs", num(ccv_rhs)},
          {"ccv_rhs_printed", num(ccv_rhs_printed)},
          {"measured_regret", num(measured_regret)},
          {"measured_ccv", num(measured_ccv)},
          {"regret_slack", num(regret_rhs > 0 ? measured_regret / regret_rhs : kNaN)},
          {"ccv_slack", num(ccv_rhs > 0 ? measured_ccv / ccv_rhs : kNaN)},
          {"regret_ok", regret_ok()},
          {"ccv_ok", ccv_ok()}};
}

double forward_regret_bound(double r_max, double alpha, int m, double diam, double E_Z) {
  return optimistic_constant(r_max, alpha, m, diam) * std::sqrt(E_Z);
}

}  // namespace cocom
