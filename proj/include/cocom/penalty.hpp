#pragma once

#include <deque>

#include "cocom/core.hpp"

namespace cocom {

class Penalty {
 public:
  enum class Kind { Quadratic, Exponential };
  static constexpr double kExpCap = 700.0;

  Penalty(Kind kind, double lambda);
  static Penalty quadratic(double lambda) { return {Kind::Quadratic, lambda}; }
  static Penalty exponential(double lambda) { return {Kind::Exponential, lambda}; }

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  Penalty with_lambda(double lambda) const { return {kind_, lambda}; }

  double value(double V) const;
  double prime(double V) const;
  // true when lambda * V exceeds the exponent cap
  bool saturates(double V) const;

 private:
  Kind kind_;
  double lambda_;
};

double phi_value(const Penalty& p, double V);
double phi_prime(const Penalty& p, double V);

const char* to_string(Penalty::Kind k);
Penalty::Kind parse_penalty_kind(const std::string& s);

// Cumulative violation with a short look-back. Rounds before the first one read as 0.
class PenaltyState {
 public:
  // depth: how many past rounds stay addressable
  PenaltyState(int first_round, int depth);

  double now() const { return v_now_; }
  int round() const { return round_; }
  // V after round `r`, for r <= round(); r < first round reads 0
  double at(int r) const;
  // close round round()+1 with the given nonnegative increment
  void advance(double increment);

 private:
  int first_round_;
  int round_;
  std::size_t depth_;
  double v_now_ = 0.0;
  std::deque<double> recent_;  // recent_.back() == v_now_
};

enum class LambdaTheorem { Thm12, Thm3, Thm4 };

struct LambdaParams {
  int T = 0;
  int m = 0;
  double diam = 0.0;  // ||X||
  double L_f = 0.0;
  double L_g = 0.0;
  double G = 0.0;
  double C = 0.0;  // optimistic regret constant
  double E = 0.0;  // estimate of the cumulative constraint prediction error
};

double theorem_lambda(LambdaTheorem which, const LambdaParams& p);

// Appendix-style 1/sqrt(t) schedule or a fixed value.
struct LambdaSchedule {
  enum class Mode { Fixed, InvSqrtT };
  Mode mode = Mode::Fixed;
  double value = 1.0;

  double at(int t) const;
};

}  // namespace cocom
