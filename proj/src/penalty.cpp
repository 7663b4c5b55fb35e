#include "cocom/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace cocom {

Penalty::Penalty(Kind kind, double lambda) : kind_(kind), lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("penalty lambda must be positive and finite");
}

bool Penalty::saturates(double V) const { return kind_ == Kind::Exponential && lambda_ * V > kExpCap; }

double Penalty::value(double V) const {
  if (!(V >= 0.0)) throw ContractViolation("phi_value: V must be >= 0");
  if (kind_ == Kind::Quadratic) return lambda_ * V * V;
  return std::expm1(std::min(lambda_ * V, kExpCap));
}

double Penalty::prime(double V) const {
  if (!(V >= 0.0)) throw ContractViolation("phi_prime: V must be >= 0");
  if (kind_ == Kind::Quadratic) return 2.0 * lambda_ * V;
  return lambda_ * std::exp(std::min(lambda_ * V, kExpCap));
}

double phi_value(const Penalty& p, double V) { return p.value(V); }
double phi_prime(const Penalty& p, double V) { return p.prime(V); }

const char* to_string(Penalty::Kind k) { return k == Penalty::Kind::Quadratic ? "quadratic" : "exponential"; }

Penalty::Kind parse_penalty_kind(const std::string& s) {
  if (s == "quadratic") return Penalty::Kind::Quadratic;
  if (s == "exponential") return Penalty::Kind::Exponential;
  throw ConfigError("unknown penalty kind: " + s);
}

PenaltyState::PenaltyState(int first_round, int depth)
    : first_round_(first_round), round_(first_round - 1), depth_(static_cast<std::size_t>(std::max(depth, 1))) {
  recent_.push_back(0.0);
}

double PenaltyState::at(int r) const {
  if (r > round_) throw ContractViolation("PenaltyState::at: round not closed yet");
  if (r < first_round_) return 0.0;
  std::size_t back = static_cast<std::size_t>(round_ - r);
  if (back >= recent_.size()) throw ContractViolation("PenaltyState::at: round older than the look-back depth");
  return recent_[recent_.size() - 1 - back];
}

void PenaltyState::advance(double increment) {
  if (!(increment >= 0.0) || !std::isfinite(increment))
    throw ContractViolation("PenaltyState::advance: increment must be finite and >= 0");
  v_now_ += increment;
  ++round_;
  recent_.push_back(v_now_);
  while (recent_.size() > depth_ + 1) recent_.pop_front();
}

double theorem_lambda(LambdaTheorem which, const LambdaParams& p) {
  double denom = 0.0;
  switch (which) {
    case LambdaTheorem::Thm12:
      if (p.T <= 0) throw ConfigError("theorem_lambda: T must be positive");
      return 1.0 / std::sqrt(static_cast<double>(p.T));
    case LambdaTheorem::Thm3: {
      double T = p.T;
      double m15 = std::pow(static_cast<double>(p.m), 1.5);
      denom = std::sqrt(2.0 * T) * p.diam * p.L_g + m15 * p.diam * std::sqrt(T * p.L_f * p.L_g);
      if (!(denom > 0.0) || !std::isfinite(denom)) throw ConfigError("theorem_lambda: nonpositive denominator");
      return 0.5 / denom;
    }
    case LambdaTheorem::Thm4:
      if (p.E < 0.0) throw ConfigError("theorem_lambda: negative error estimate");
      denom = 2.0 * (p.C * std::sqrt(p.E) + p.G * (p.m + 1));
      if (!(denom > 0.0) || !std::isfinite(denom)) throw ConfigError("theorem_lambda: nonpositive denominator");
      return 1.0 / denom;
  }
  throw ConfigError("theorem_lambda: unknown theorem");
}

double LambdaSchedule::at(int t) const {
  if (mode == Mode::Fixed) return value;
  return 1.0 / std::sqrt(static_cast<double>(std::max(t, 1)));
}

}  // namespace cocom
