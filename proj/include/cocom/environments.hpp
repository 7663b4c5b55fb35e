#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cocom/core.hpp"

namespace cocom {

// Analytic problem constants used by step sizes and bound calculators.
struct InstanceConstants {
  double diam = 0.0;  // ||X||
  double L_f = 0.0;
  double L_g = 0.0;
  double F = 0.0;  // |f| <= F
  double G = 0.0;  // |g| <= G
};

nlohmann::json to_json(const InstanceConstants& c);

// (1/(m+1)) sum_i 0.5 * ||x_{t-i} - c||^2
class AveragedQuadraticOracle final : public MemoryFunctionOracle {
 public:
  AveragedQuadraticOracle(Vec c, int m, double lipschitz, double bound);
  std::size_t dim() const override { return c_.size(); }
  int memory() const override { return m_; }
  double value(const MemoryWindow& w) const override;
  Vec grad_wrt_last(const MemoryWindow& w) const override;
  Vec grad_splat(const DecisionVector& x) const override;
  double lipschitz() const override { return lip_; }
  double bound() const override { return bound_; }

 private:
  Vec c_;
  int m_;
  double lip_, bound_;
};

// (1/(m+1)) sum_i <d, x_{t-i}> - delta
class AveragedLinearOracle final : public MemoryFunctionOracle {
 public:
  AveragedLinearOracle(Vec d, double delta, int m, double lipschitz, double bound);
  std::size_t dim() const override { return d_.size(); }
  int memory() const override { return m_; }
  double value(const MemoryWindow& w) const override;
  Vec grad_wrt_last(const MemoryWindow& w) const override;
  Vec grad_splat(const DecisionVector&) const override { return d_; }
  double lipschitz() const override { return lip_; }
  double bound() const override { return bound_; }

 private:
  Vec d_;
  double delta_;
  int m_;
  double lip_, bound_;
};

// Memory-free view: evaluates the lift of `inner` at the newest decision only.
class NewestDecisionOracle final : public MemoryFunctionOracle {
 public:
  explicit NewestDecisionOracle(OraclePtr inner) : inner_(std::move(inner)) {}
  std::size_t dim() const override { return inner_->dim(); }
  int memory() const override { return inner_->memory(); }
  double value(const MemoryWindow& w) const override { return inner_->value_splat(w.newest()); }
  Vec grad_wrt_last(const MemoryWindow& w) const override { return inner_->grad_splat(w.newest()); }
  Vec grad_splat(const DecisionVector& x) const override { return inner_->grad_splat(x); }
  double lipschitz() const override { return inner_->lipschitz(); }
  double bound() const override { return inner_->bound(); }

 private:
  OraclePtr inner_;
};

enum class AppendixAMode { Stochastic, AdversarialMixture };
const char* to_string(AppendixAMode m);
AppendixAMode parse_appendix_a_mode(const std::string& s);

struct AppendixAParams {
  int m = 3;
  int T = 4000;
  double R = 15.0;
  double sigma = 10.0;
  double delta = 1.0;
  double gamma = 3.0;
  int dim = 1;
  AppendixAMode mode = AppendixAMode::Stochastic;

  double B() const { return gamma * sigma; }
  void validate() const;
};

nlohmann::json to_json(const AppendixAParams& p);
AppendixAParams appendix_a_params_from_json(const nlohmann::json& j);

// Quadratic tracking loss and linear constraint, both averaged over the memory window.
class AppendixAInstance {
 public:
  static AppendixAInstance generate(const AppendixAParams& params, std::uint64_t seed);

  const AppendixAParams& params() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  int m() const { return p_.m; }
  int T() const { return p_.T; }
  int first_round() const { return p_.m; }
  std::size_t dim() const { return static_cast<std::size_t>(p_.dim); }

  const Vec& c(int t) const;
  const Vec& d(int t) const;

  FeasibleSet set() const;
  InstanceConstants constants() const;

  OraclePtr loss(int t) const;
  // COCO-M uses g_t(x_t); COCO-M2 uses g_t on the window
  OraclePtr constraint(int t, ProblemVariant v) const;

  double lifted_loss(int t, const Vec& x) const;
  double lifted_constraint(int t, const Vec& x) const;
  // sum_{t=m}^{t_end} lifted_loss(t, x)
  double lifted_loss_total(const Vec& x, int t_end) const;
  bool benchmark_feasible(const Vec& x, int t_end, double tol = 0.0) const;
  // min of lifted_loss(t, .) over {x in X : g_t(x) <= 0}, exact
  double per_round_min(int t) const;
  // positive part of the lifted constraint at the set center in the first round
  double initial_violation() const;

  nlohmann::json to_json() const;
  static AppendixAInstance from_json(const nlohmann::json& j);

 private:
  AppendixAInstance() = default;
  void build_prefix();

  AppendixAParams p_;
  std::uint64_t seed_ = 0;
  std::vector<Vec> c_, d_;  // index t - m
  std::vector<Vec> c_prefix_;
  std::vector<double> csq_prefix_;
};

struct AffineSlice {
  Vec coeff;
  double offset = 0.0;
  double value(const Vec& x) const { return dot(coeff, x) + offset; }
};

struct SeparableParams {
  int m = 2;
  int T = 2000;
  int dim = 1;
  double half_width = 1.0;        // X = [-w, w]^d
  double loss_drift = 0.5;        // mean of every loss coefficient, split over delays
  double loss_noise = 1.0;        // uniform spread of loss coefficients
  double constraint_bias = 0.5;   // mean of constraint coefficients
  double constraint_noise = 0.5;
  double margin_max = 0.2;        // constraint slack at the center, drawn in [0, margin_max]
  bool memoryless_constraint = false;  // only delay-0 constraint slices (COCO-M)

  void validate() const;
};

nlohmann::json to_json(const SeparableParams& p);
SeparableParams separable_params_from_json(const nlohmann::json& j);

// Separable linear slices f_t^i, g_t^i acting on x_{t-i}; zero for t <= m or t > T.
class SeparableInstance {
 public:
  static SeparableInstance generate(const SeparableParams& params, std::uint64_t seed);

  const SeparableParams& params() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  int m() const { return p_.m; }
  int T() const { return p_.T; }
  std::size_t dim() const { return static_cast<std::size_t>(p_.dim); }

  const AffineSlice& f_slice(int t, int i) const;
  const AffineSlice& g_slice(int t, int i) const;

  FeasibleSet set() const;
  InstanceConstants constants() const { return constants_; }

  double lifted_loss(int t, const Vec& x) const;
  double lifted_constraint(int t, const Vec& x) const;
  double lifted_loss_total(const Vec& x, int t_end) const;
  // every constraint slice nonpositive up to round t_end
  bool benchmark_feasible(const Vec& x, int t_end, double tol = 0.0) const;
  // min of lifted_loss(t, .) over {x in X : g_t(x, ..., x) <= 0}; 1-D only
  std::optional<double> per_round_min(int t) const;

  nlohmann::json to_json() const;
  static SeparableInstance from_json(const nlohmann::json& j);

 private:
  SeparableInstance() = default;
  void compute_constants();
  std::size_t idx(int t, int i) const;

  SeparableParams p_;
  std::uint64_t seed_ = 0;
  std::vector<AffineSlice> f_, g_;  // rounds m+1..T, delays 0..m
  AffineSlice zero_;
  InstanceConstants constants_;
  Vec f_coeff_total_;
  double f_offset_total_ = 0.0;
};

struct SlicePrediction {
  Vec f_coeff;
  Vec g_coeff;
  bool active = false;  // predicted sign of g at the prediction point
};

class Predictor {
 public:
  enum class Kind { Perfect, Noisy, Zero };

  Predictor(Kind kind, double scale = 0.0, std::uint64_t seed = 0);

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }

  // slice (round, delay) evaluated for the decision at `point`
  SlicePrediction predict(const SeparableInstance& inst, int round, int delay, const Vec& point) const;

 private:
  Kind kind_;
  double scale_;
  std::uint64_t seed_;
};

const char* to_string(Predictor::Kind k);
Predictor::Kind parse_predictor_kind(const std::string& s);

}  // namespace cocom
