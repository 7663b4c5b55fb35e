#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cocom/core.hpp"
#include "cocom/environments.hpp"
#include "cocom/penalty.hpp"

namespace cocom {

struct Benchmark {
  bool feasible = false;  // false: the benchmark set is empty and regret is undefined
  Vec x_star;
  double total = 0.0;  // cumulative lifted loss at x_star
};

using Objective = std::function<double(const Vec&)>;
using Membership = std::function<bool(const Vec&)>;

// Grid search over the set (d <= 2) at the given spacing, restricted to `feasible`.
Benchmark grid_benchmark(const FeasibleSet& set, double resolution, const Objective& objective,
                         const Membership& feasible);

// Exact minimizer of the cumulative lifted loss over the benchmark set up to round t_end (d = 1).
Benchmark closed_form_benchmark(const AppendixAInstance& inst, int t_end);
Benchmark closed_form_benchmark(const SeparableInstance& inst, int t_end);

// Benchmark value for every prefix t = first..T (d = 1), NaN where the prefix set is empty.
std::vector<double> prefix_benchmarks(const AppendixAInstance& inst);
std::vector<double> prefix_benchmarks(const SeparableInstance& inst, int first_round);

// Closed form where available (d = 1), grid otherwise.
Benchmark best_in_hindsight(const AppendixAInstance& inst, double resolution);
Benchmark best_in_hindsight(const SeparableInstance& inst, double resolution);

struct RunTrace {
  ProblemVariant variant = ProblemVariant::CocoM2;
  std::vector<RoundRecord> rounds;
  std::vector<double> prefix_benchmark;  // per record: min over the benchmark set of the lifted prefix sum
  std::vector<double> per_round_min;     // per record: min f_hat_t over {g_t <= 0}
  Benchmark benchmark;                   // full horizon
};

struct RegretSeries {
  std::vector<double> static_cum;    // anytime regret against the prefix benchmark
  std::vector<double> perround_cum;  // against the per-round comparator
  std::vector<double> ccv_cum;
  double R_mc = 0.0;      // sum f_t(window) - benchmark
  double R_hat_c = 0.0;   // sum f_hat_t(x_t) - benchmark
  double memory_deviation = 0.0;  // sum f_t(window) - f_hat_t(x_t)
  double ccv = 0.0;
  bool benchmark_feasible = true;
};

RegretSeries regret_and_ccv(const RunTrace& trace);

struct BoundInputs {
  int T = 0;
  int m = 0;
  InstanceConstants k;
  ProblemVariant variant = ProblemVariant::CocoM2;
  Penalty::Kind penalty = Penalty::Kind::Quadratic;
  double lambda = 0.0;
  double v_hat_m = 0.0;  // lifted violation after the first round, known from the instance
};

struct BoundReport {
  std::string theorem;  // "thm1", "thm2", "thm3" or "none"
  bool precondition_ok = true;
  double lambda = 0.0;
  double regret_rhs = 0.0;
  double ccv_rhs = 0.0;
  double ccv_rhs_printed = 0.0;  // same bound with the constants exactly as printed
  double measured_regret = 0.0;
  double measured_ccv = 0.0;

  bool regret_ok() const { return measured_regret <= regret_rhs; }
  bool ccv_ok() const { return measured_ccv <= ccv_rhs; }
  nlohmann::json to_json() const;
};

// largest admissible memory for the short-window exponential penalty result
bool thm3_condition(int T, int m);
BoundReport theoretical_bounds(const BoundInputs& in);

// memory term m^{3/2} L (||X||/sqrt 2) sqrt(T) sqrt(log T + 2 log(L_f + sqrt(T) L_g))
double memory_term(int T, int m, double L, double diam, double L_f, double L_g);

// C * sqrt(E) bound on the forward-function regret
double forward_regret_bound(double r_max, double alpha, int m, double diam, double E_Z);

}  // namespace cocom
