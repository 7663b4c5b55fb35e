#pragma once

#include <vector>

#include "cocom/core.hpp"
#include "cocom/environments.hpp"
#include "cocom/geometry.hpp"
#include "cocom/penalty.hpp"

namespace cocom {

// 0.5 x^2 - 0.5 (|x| - |y|)_+^2
double huber(double x, double y);

// Per-(round, delay) gradient slices of the forward function, plus completed forward gradients.
// Slice (r, j) belongs to decision s = r - j.
class GradientLedger {
 public:
  GradientLedger(int m, std::size_t dim);

  void reveal(int round, int delay, Vec grad_f, Vec grad_g_plus);
  bool revealed(int round, int delay) const;
  const Vec& grad_f(int round, int delay) const;
  const Vec& grad_g_plus(int round, int delay) const;

  void set_forward(int s, Vec z);
  bool has_forward(int s) const;
  const Vec& forward(int s) const;

 private:
  struct Slot {
    bool known = false;
    Vec f, g;
  };
  const Slot& slot(int round, int delay) const;

  int m_;
  std::size_t dim_;
  std::vector<std::vector<Slot>> slices_;  // [round][delay]
  std::vector<Vec> forward_;
  std::vector<bool> has_forward_;
};

// One predicted slice inside a hint, kept for the error split.
struct PredictedTerm {
  int round = 0;
  int delay = 0;
  Vec f;           // predicted grad f
  Vec g_plus;      // predicted grad g^+
  double mult = 0.0;
};

struct Hint {
  Vec h;
  std::vector<PredictedTerm> predicted;
};

// Optimistic delayed FTRL on the forward function with the delayed-upper-bound weights.
class OdafLearner {
 public:
  struct Params {
    ProblemVariant variant = ProblemVariant::CocoM2;
    Penalty::Kind penalty = Penalty::Kind::Exponential;
    double lambda = 1.0;
    double alpha = 0.0;  // 0 selects ||X||^2
  };

  OdafLearner(const SeparableInstance& inst, const Predictor& pred, Params params);

  // decision to be played in the next round
  const DecisionVector& x() const { return decisions_.back(); }
  int next_round() const { return static_cast<int>(decisions_.size()) - 1; }
  double mu() const { return mu_next_; }
  double lambda() const { return penalty_.lambda(); }
  double alpha() const { return alpha_; }
  double V() const { return pen_state_.now(); }
  const Penalty& penalty() const { return penalty_; }
  const Regularizer& regularizer() const { return reg_; }
  const GradientLedger& ledger() const { return ledger_; }
  const std::vector<DecisionVector>& decisions() const { return decisions_; }  // index = round, [0] unused

  // Play round t = next_round(), observe its slices and choose the next decision.
  RoundRecord round();

  // Start a fresh inner learner at the upcoming round: sums, weights, violation and
  // hints restart, decisions already played are kept. The next decision is recomputed.
  void restart(double lambda);

  // Close the forward gradients and hint errors still open after round T.
  void finish();

  // Totals over the current epoch
  double E_Z() const { return e_z_; }
  double E_f() const { return e_f_; }
  double E_g() const { return e_g_; }
  double E_g_literal() const { return e_g_lit_; }
  double Z_value_sum() const { return z_value_sum_; }  // sum_s Z_s(x_s) over closed forward functions
  int fixed_point_misses() const { return fp_misses_; }
  int epoch_start() const { return epoch_start_; }

  // multiplier of slice (s + j, j) in Z_s
  double multiplier(int s, int j) const;
  const Hint* hint_for(int s) const;

  struct ErrorSplit {
    double eps_Z = 0.0, eps_f = 0.0, eps_g = 0.0, eps_g_literal = 0.0;
  };

 private:
  void close_forward(int s);
  ErrorSplit close_hint(int s);
  void update_weights(int s, const ErrorSplit& e);
  // forced: activity flags for the target's own slices instead of the predicted ones
  Hint build_hint(int target, const Vec& point, std::vector<bool>* flags,
                  const std::vector<bool>* forced = nullptr) const;
  void decide(int target);
  bool slice_in_horizon(int r) const { return r > m_ && r <= T_; }

  const SeparableInstance& inst_;
  const Predictor& pred_;
  Params params_;
  int m_, T_;
  FeasibleSet set_;
  Regularizer reg_;
  double alpha_;
  Penalty penalty_;
  PenaltyState pen_state_;
  GradientLedger ledger_;

  std::vector<DecisionVector> decisions_;
  std::vector<Hint> hints_;  // index = round
  std::vector<bool> has_hint_;
  std::vector<double> mu_used_;
  int epoch_start_ = 1;

  Vec revealed_sum_;
  std::vector<double> a_, b_;  // index = round
  double a_window_max_ = 0.0;
  double ab_sum_ = 0.0;
  double mu_next_ = 0.0;

  double e_z_ = 0.0, e_f_ = 0.0, e_g_ = 0.0, e_g_lit_ = 0.0;
  double z_value_sum_ = 0.0;
  int fp_misses_ = 0;
  int last_closed_forward_ = 0;
  int last_closed_hint_ = 0;
};

// Epoch bookkeeping: budget mu_N = 2^{N-1} mu_1, psi(Delta, E) = C sqrt(E).
class DoublingController {
 public:
  DoublingController(double mu1, double c, double C);

  // start of a round; true when a new epoch begins
  bool before_round();
  void after_round(double eps_g);

  int epochs() const { return n_; }
  double lambda() const { return 1.0 / (2.0 * (mu_budget_ + c_)); }
  double mu1() const { return mu1_; }
  double mu_budget() const { return mu_budget_; }
  double mu_empirical() const { return mu_emp_; }
  double mu_peak() const { return mu_peak_; }  // largest psi seen in any epoch
  double psi(double E) const;

 private:
  double mu1_, c_, C_;
  int n_ = 1;
  double mu_budget_;
  int delta_ = 0;
  double e_ = 0.0;
  double mu_emp_ = 0.0;
  double mu_peak_ = 0.0;
};

// C = (r_max / alpha + 1) * (m ||X|| + sqrt(||X||^2 + alpha))
double optimistic_constant(double r_max, double alpha, int m, double diam);

class OdafDoublingLearner {
 public:
  struct Params {
    ProblemVariant variant = ProblemVariant::CocoM2;
    double alpha = 0.0;
    double T1 = 0.0;  // unused by psi = C sqrt(E); kept for the interface
    double E1 = 0.0;
  };

  OdafDoublingLearner(const SeparableInstance& inst, const Predictor& pred, Params params);

  RoundRecord round();
  void finish() { inner_.finish(); }
  const OdafLearner& inner() const { return inner_; }
  const DoublingController& controller() const { return ctl_; }
  int next_round() const { return inner_.next_round(); }

 private:
  static DoublingController make_controller(const SeparableInstance& inst, const Params& p);
  DoublingController ctl_;
  OdafLearner inner_;
};

}  // namespace cocom
