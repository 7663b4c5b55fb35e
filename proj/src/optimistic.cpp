#include "cocom/optimistic.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace cocom {

double huber(double x, double y) {
  double hinge = std::max(0.0, std::abs(x) - std::abs(y));
  return 0.5 * x * x - 0.5 * hinge * hinge;
}

GradientLedger::GradientLedger(int m, std::size_t dim) : m_(m), dim_(dim) {}

void GradientLedger::reveal(int round, int delay, Vec grad_f, Vec grad_g_plus) {
  if (round < 0 || delay < 0 || delay > m_) throw ContractViolation("ledger: bad slice key");
  if (grad_f.size() != dim_ || grad_g_plus.size() != dim_) throw ContractViolation("ledger: dimension mismatch");
  if (slices_.size() <= static_cast<std::size_t>(round)) slices_.resize(static_cast<std::size_t>(round) + 1);
  auto& row = slices_[static_cast<std::size_t>(round)];
  if (row.empty()) row.resize(static_cast<std::size_t>(m_) + 1);
  row[static_cast<std::size_t>(delay)] = Slot{true, std::move(grad_f), std::move(grad_g_plus)};
}

bool GradientLedger::revealed(int round, int delay) const {
  if (round < 0 || delay < 0 || delay > m_ || static_cast<std::size_t>(round) >= slices_.size()) return false;
  const auto& row = slices_[static_cast<std::size_t>(round)];
  return !row.empty() && row[static_cast<std::size_t>(delay)].known;
}

const GradientLedger::Slot& GradientLedger::slot(int round, int delay) const {
  if (!revealed(round, delay)) throw ContractViolation("ledger: slice not revealed yet");
  return slices_[static_cast<std::size_t>(round)][static_cast<std::size_t>(delay)];
}

const Vec& GradientLedger::grad_f(int round, int delay) const { return slot(round, delay).f; }
const Vec& GradientLedger::grad_g_plus(int round, int delay) const { return slot(round, delay).g; }

void GradientLedger::set_forward(int s, Vec z) {
  if (s < 0) throw ContractViolation("ledger: negative decision index");
  if (forward_.size() <= static_cast<std::size_t>(s)) {
    forward_.resize(static_cast<std::size_t>(s) + 1);
    has_forward_.resize(static_cast<std::size_t>(s) + 1, false);
  }
  forward_[static_cast<std::size_t>(s)] = std::move(z);
  has_forward_[static_cast<std::size_t>(s)] = true;
}

bool GradientLedger::has_forward(int s) const {
  return s >= 0 && static_cast<std::size_t>(s) < has_forward_.size() && has_forward_[static_cast<std::size_t>(s)];
}

const Vec& GradientLedger::forward(int s) const {
  if (!has_forward(s)) throw ContractViolation("ledger: forward gradient requested before it is revealed");
  return forward_[static_cast<std::size_t>(s)];
}

OdafLearner::OdafLearner(const SeparableInstance& inst, const Predictor& pred, Params params)
    : inst_(inst),
      pred_(pred),
      params_(params),
      m_(inst.m()),
      T_(inst.T()),
      set_(inst.set()),
      reg_(Regularizer::for_set(set_)),
      alpha_(params.alpha > 0.0 ? params.alpha : set_.diameter() * set_.diameter()),
      penalty_(params.penalty, params.lambda),
      pen_state_(1, 2 * inst.m() + 2),
      ledger_(inst.m(), inst.dim()),
      revealed_sum_(inst.dim(), 0.0) {
  if (params.variant == ProblemVariant::CocoM) {
    for (int t = m_ + 1; t <= T_; ++t)
      for (int j = 1; j <= m_; ++j)
        if (norm_sq(inst.g_slice(t, j).coeff) != 0.0 || inst.g_slice(t, j).offset != 0.0)
          throw ConfigError("optimistic COCO-M needs a memory-less constraint (delay-0 slices only)");
  }
  std::size_t n = static_cast<std::size_t>(T_) + 2;
  hints_.resize(n);
  has_hint_.assign(n, false);
  mu_used_.assign(n, 0.0);
  a_.assign(n, 0.0);
  b_.assign(n, 0.0);
  decisions_.push_back(set_.center());  // slot 0 is never played
  decide(1);
}

double OdafLearner::multiplier(int s, int j) const {
  int r = params_.variant == ProblemVariant::CocoM2 ? s - m_ - 1 + j : s - 1;
  return penalty_.prime(pen_state_.at(r));
}

const Hint* OdafLearner::hint_for(int s) const {
  if (s < 0 || static_cast<std::size_t>(s) >= has_hint_.size() || !has_hint_[static_cast<std::size_t>(s)])
    return nullptr;
  return &hints_[static_cast<std::size_t>(s)];
}

Hint OdafLearner::build_hint(int target, const Vec& point, std::vector<bool>* flags,
                             const std::vector<bool>* forced) const {
  Hint out;
  out.h.assign(inst_.dim(), 0.0);
  auto add_predicted = [&](int s, int j, const Vec& at) {
    int r = s + j;
    if (!slice_in_horizon(r)) return false;
    SlicePrediction p = pred_.predict(inst_, r, j, at);
    if (!all_finite(p.f_coeff) || !all_finite(p.g_coeff)) return false;  // fall back to zero for this slice
    if (forced && s == target) p.active = (*forced)[static_cast<std::size_t>(j)];
    PredictedTerm term{r, j, std::move(p.f_coeff), p.active ? std::move(p.g_coeff) : Vec(inst_.dim(), 0.0),
                       multiplier(s, j)};
    axpy(1.0, term.f, out.h);
    axpy(term.mult, term.g_plus, out.h);
    out.predicted.push_back(std::move(term));
    return p.active;
  };
  // pending decisions: slices up to the previous round are known, later ones predicted
  for (int i = 0; i < m_; ++i) {
    int s = target - m_ + i;
    if (s < epoch_start_ || s < 1) continue;
    for (int j = 0; j <= m_; ++j) {
      int r = s + j;
      if (r <= target - 1) {
        axpy(1.0, ledger_.grad_f(r, j), out.h);
        axpy(multiplier(s, j), ledger_.grad_g_plus(r, j), out.h);
      } else {
        add_predicted(s, j, decisions_[static_cast<std::size_t>(s)]);
      }
    }
  }
  // the upcoming decision: every slice predicted
  for (int j = 0; j <= m_; ++j) {
    bool active = add_predicted(target, j, point);
    if (flags) flags->push_back(active);
  }
  return out;
}

void OdafLearner::decide(int target) {
  const double mu = mu_next_;
  mu_used_[static_cast<std::size_t>(target)] = mu;
  // The g^+ activity of the upcoming decision's own slices depends on that decision, so the
  // prediction point is iterated to a fixed point (at most 2^{m+1} flag patterns exist).
  Vec point = decisions_.back();
  const int max_iter = (1 << std::min(m_ + 1, 12)) + 1;
  Hint hint;
  Vec x;
  bool settled = false;
  for (int it = 0; it < max_iter && !settled; ++it) {
    std::vector<bool> used, at_x;
    hint = build_hint(target, point, &used);
    x = ftrl_argmin(set_, add(revealed_sum_, hint.h), mu, reg_);
    build_hint(target, x, &at_x);
    settled = used == at_x;
    point = x;
  }
  // Plain iteration can cycle; try every flag pattern for a self-consistent one.
  const int bits = m_ + 1;
  for (std::uint64_t mask = 0; !settled && bits <= 12 && mask < (std::uint64_t{1} << bits); ++mask) {
    std::vector<bool> forced(static_cast<std::size_t>(bits)), at_x;
    for (int j = 0; j < bits; ++j) forced[static_cast<std::size_t>(j)] = (mask >> j) & 1;
    Hint h = build_hint(target, point, nullptr, &forced);
    Vec y = ftrl_argmin(set_, add(revealed_sum_, h.h), mu, reg_);
    build_hint(target, y, &at_x);
    if (at_x == forced) {
      settled = true;
      hint = build_hint(target, y, nullptr);
      x = std::move(y);
    }
  }
  if (!settled) {
    ++fp_misses_;
    hint = build_hint(target, point, nullptr);
    x = ftrl_argmin(set_, add(revealed_sum_, hint.h), mu, reg_);
  }
  hints_[static_cast<std::size_t>(target)] = std::move(hint);
  has_hint_[static_cast<std::size_t>(target)] = true;
  decisions_.push_back(std::move(x));
}

void OdafLearner::close_forward(int s) {
  const Vec& xs = decisions_[static_cast<std::size_t>(s)];
  Vec z(inst_.dim(), 0.0);
  double zval = 0.0;
  for (int j = 0; j <= m_; ++j) {
    int r = s + j;
    if (r > T_) continue;  // beyond the horizon every slice is zero
    double mult = multiplier(s, j);
    axpy(1.0, ledger_.grad_f(r, j), z);
    axpy(mult, ledger_.grad_g_plus(r, j), z);
    zval += inst_.f_slice(r, j).value(xs) + mult * std::max(0.0, inst_.g_slice(r, j).value(xs));
  }
  axpy(1.0, z, revealed_sum_);
  ledger_.set_forward(s, std::move(z));
  z_value_sum_ += zval;
  last_closed_forward_ = s;
}

OdafLearner::ErrorSplit OdafLearner::close_hint(int s) {
  const Hint& h = hints_[static_cast<std::size_t>(s)];
  // known slices enter the hint with their true values, so the error is carried by the predicted ones
  Vec dz(inst_.dim(), 0.0), df(inst_.dim(), 0.0), dg(inst_.dim(), 0.0);
  double dg_tri = 0.0;
  for (const auto& p : h.predicted) {
    Vec ef = sub(p.f, ledger_.grad_f(p.round, p.delay));
    Vec eg = sub(p.g_plus, ledger_.grad_g_plus(p.round, p.delay));
    axpy(1.0, ef, dz);
    axpy(p.mult, eg, dz);
    axpy(1.0, ef, df);
    axpy(1.0, eg, dg);
    dg_tri += norm(eg);
  }
  ErrorSplit e{norm_sq(dz), norm_sq(df), dg_tri * dg_tri, norm_sq(dg)};
  e_z_ += e.eps_Z;
  e_f_ += e.eps_f;
  e_g_ += e.eps_g;
  e_g_lit_ += e.eps_g_literal;
  last_closed_hint_ = s;
  return e;
}

void OdafLearner::update_weights(int s, const ErrorSplit& e) {
  double err = std::sqrt(e.eps_Z);
  double zn = norm(ledger_.forward(s));
  double a = set_.diameter() * std::min(err, zn);
  double b = huber(err, zn);
  a_[static_cast<std::size_t>(s)] = a;
  b_[static_cast<std::size_t>(s)] = b;
  ab_sum_ += a * a + 2.0 * alpha_ * b;
  int j = s - 1;
  if (j >= epoch_start_ && m_ > 0) {
    double w = 0.0;
    for (int i = std::max(j - m_ + 1, epoch_start_); i <= j; ++i) w += a_[static_cast<std::size_t>(i)];
    a_window_max_ = std::max(a_window_max_, w);
  }
  mu_next_ = std::max(mu_next_, (2.0 / alpha_) * a_window_max_ + std::sqrt(ab_sum_) / alpha_);
}

RoundRecord OdafLearner::round() {
  const int t = next_round();
  if (t > T_) throw ContractViolation("optimistic round past the horizon");
  const Vec& xt = decisions_[static_cast<std::size_t>(t)];

  RoundRecord rec;
  rec.t = t;
  rec.x = xt;
  for (int i = 0; i <= m_; ++i) {
    int s = t - i;
    if (!slice_in_horizon(t) || s < 1) {
      ledger_.reveal(t, i, Vec(inst_.dim(), 0.0), Vec(inst_.dim(), 0.0));
      continue;
    }
    const Vec& xs = decisions_[static_cast<std::size_t>(s)];
    const AffineSlice& f = inst_.f_slice(t, i);
    const AffineSlice& g = inst_.g_slice(t, i);
    double gv = g.value(xs);
    rec.f_mem += f.value(xs);
    rec.g_mem += gv;
    rec.f_lift += f.value(xt);
    rec.g_lift += g.value(xt);
    ledger_.reveal(t, i, f.coeff, gv > 0.0 ? g.coeff : Vec(inst_.dim(), 0.0));
  }
  rec.g_plus_recorded = std::max(0.0, rec.g_mem);
  rec.g_plus_true = rec.g_plus_recorded;
  pen_state_.advance(rec.g_plus_recorded);
  rec.V = pen_state_.now();
  rec.lambda = penalty_.lambda();
  rec.phi_prime = penalty_.prime(rec.V);
  rec.saturated = penalty_.saturates(rec.V);
  rec.eta_or_mu = mu_used_[static_cast<std::size_t>(t)];

  int s = t - m_;
  if (s >= epoch_start_ && s >= 1) {
    close_forward(s);
    if (has_hint_[static_cast<std::size_t>(s)]) {
      ErrorSplit e = close_hint(s);
      update_weights(s, e);
      rec.eps_Z = e.eps_Z;
      rec.eps_f = e.eps_f;
      rec.eps_g = e.eps_g;
      rec.eps_g_literal = e.eps_g_literal;
    }
  }
  if (t < T_) decide(t + 1);
  else decisions_.push_back(xt);  // keeps next_round() consistent; never played
  return rec;
}

void OdafLearner::finish() {
  for (int s = std::max(last_closed_forward_ + 1, epoch_start_); s <= T_; ++s) close_forward(s);
  for (int s = std::max(last_closed_hint_ + 1, epoch_start_); s <= T_; ++s)
    if (has_hint_[static_cast<std::size_t>(s)]) close_hint(s);
}

void OdafLearner::restart(double lambda) {
  const int target = next_round();
  decisions_.pop_back();
  has_hint_[static_cast<std::size_t>(target)] = false;
  penalty_ = penalty_.with_lambda(lambda);
  pen_state_ = PenaltyState(target, 2 * m_ + 2);
  epoch_start_ = target;
  std::fill(revealed_sum_.begin(), revealed_sum_.end(), 0.0);
  a_window_max_ = 0.0;
  ab_sum_ = 0.0;
  mu_next_ = 0.0;
  e_z_ = e_f_ = e_g_ = e_g_lit_ = 0.0;
  z_value_sum_ = 0.0;
  last_closed_forward_ = target - 1;
  last_closed_hint_ = target - 1;
  decide(target);
}

DoublingController::DoublingController(double mu1, double c, double C) : mu1_(mu1), c_(c), C_(C), mu_budget_(mu1) {
  if (!(mu1 > 0.0) || !(c >= 0.0) || !(C >= 0.0)) throw ConfigError("doubling: need mu1 > 0, c >= 0, C >= 0");
}

double DoublingController::psi(double E) const { return C_ * std::sqrt(E); }

bool DoublingController::before_round() {
  if (mu_emp_ <= mu_budget_) return false;
  ++n_;
  mu_budget_ = std::ldexp(mu1_, n_ - 1);
  delta_ = 0;
  e_ = 0.0;
  mu_emp_ = 0.0;
  return true;
}

void DoublingController::after_round(double eps_g) {
  ++delta_;
  e_ += eps_g;
  mu_emp_ = psi(e_);
  mu_peak_ = std::max(mu_peak_, mu_emp_);
}

double optimistic_constant(double r_max, double alpha, int m, double diam) {
  return (r_max / alpha + 1.0) * (m * diam + std::sqrt(diam * diam + alpha));
}

DoublingController OdafDoublingLearner::make_controller(const SeparableInstance& inst, const Params& p) {
  FeasibleSet set = inst.set();
  double alpha = p.alpha > 0.0 ? p.alpha : set.diameter() * set.diameter();
  double C = optimistic_constant(Regularizer::for_set(set).r_max, alpha, inst.m(), set.diameter());
  double c = inst.constants().G * (inst.m() + 1);
  double mu1 = std::max(C * std::sqrt(p.E1), C * std::sqrt(DBL_EPSILON));
  return DoublingController(mu1, c, C);
}

OdafDoublingLearner::OdafDoublingLearner(const SeparableInstance& inst, const Predictor& pred, Params params)
    : ctl_(make_controller(inst, params)),
      inner_(inst, pred,
             OdafLearner::Params{params.variant, Penalty::Kind::Exponential, ctl_.lambda(), params.alpha}) {}

RoundRecord OdafDoublingLearner::round() {
  if (ctl_.before_round()) inner_.restart(ctl_.lambda());
  RoundRecord rec = inner_.round();
  ctl_.after_round(rec.eps_g);
  rec.epoch = ctl_.epochs();
  return rec;
}

}  // namespace cocom
