#include "cocom/core.hpp"

#include <algorithm>
#include <cmath>

namespace cocom {

const char* to_string(ProblemVariant v) { return v == ProblemVariant::CocoM ? "coco_m" : "coco_m2"; }

ProblemVariant parse_variant(const std::string& s) {
  if (s == "coco_m" || s == "CocoM") return ProblemVariant::CocoM;
  if (s == "coco_m2" || s == "CocoM2") return ProblemVariant::CocoM2;
  throw ConfigError("unknown problem variant: " + s);
}

double dot(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

double dist(const Vec& a, const Vec& b) { return norm(sub(a, b)); }

Vec add(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "add");
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "sub");
  Vec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Vec scaled(const Vec& a, double s) {
  Vec r(a);
  for (double& v : r) v *= s;
  return r;
}

void axpy(double a, const Vec& x, Vec& y) {
  require_same_dim(x, y, "axpy");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

bool all_finite(const Vec& a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

void require_same_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size())
    throw ContractViolation(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
}

MemoryWindow::MemoryWindow(int m, const DecisionVector& fill) : m_(m) {
  if (m < 0) throw ContractViolation("MemoryWindow: negative memory");
  if (fill.empty()) throw ContractViolation("MemoryWindow: empty decision vector");
  if (!all_finite(fill)) throw ContractViolation("MemoryWindow: non-finite decision");
  entries_.assign(static_cast<std::size_t>(m) + 1, fill);
}

const DecisionVector& MemoryWindow::lag(int i) const {
  if (i < 0 || i > m_) throw ContractViolation("MemoryWindow::lag out of range");
  return entries_[static_cast<std::size_t>(m_ - i)];
}

void MemoryWindow::push(const DecisionVector& x) {
  if (x.size() != dim()) throw ContractViolation("MemoryWindow::push: dimension mismatch");
  if (!all_finite(x)) throw ContractViolation("MemoryWindow::push: non-finite decision");
  // m is small; a shift is cheaper than maintaining a ring offset everywhere
  for (std::size_t i = 0; i + 1 < entries_.size(); ++i) entries_[i] = std::move(entries_[i + 1]);
  entries_.back() = x;
}

MemoryWindow splat(const DecisionVector& x, int m) { return MemoryWindow(m, x); }

FeasibleSet FeasibleSet::box(Vec lo, Vec hi) {
  if (lo.empty() || lo.size() != hi.size()) throw ConfigError("box: bounds must be nonempty and equal length");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw ConfigError("box: need finite lo <= hi");
  FeasibleSet s;
  s.kind_ = Kind::Box;
  s.diameter_ = dist(lo, hi);
  s.a_ = std::move(lo);
  s.b_ = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::cube(std::size_t d, double lo, double hi) { return box(Vec(d, lo), Vec(d, hi)); }

FeasibleSet FeasibleSet::ball(Vec center, double radius) {
  if (center.empty() || !all_finite(center)) throw ConfigError("ball: bad center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball: radius must be positive");
  FeasibleSet s;
  s.kind_ = Kind::Ball;
  s.a_ = std::move(center);
  s.radius_ = radius;
  s.diameter_ = 2.0 * radius;
  return s;
}

Vec FeasibleSet::center() const {
  if (kind_ == Kind::Ball) return a_;
  Vec c(a_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (a_[i] + b_[i]);
  return c;
}

double FeasibleSet::max_radius() const { return kind_ == Kind::Ball ? radius_ : 0.5 * diameter_; }

bool FeasibleSet::contains(const Vec& x, double tol) const {
  if (x.size() != dim()) return false;
  if (kind_ == Kind::Ball) return dist(x, a_) <= radius_ * (1.0 + tol) + tol;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < a_[i] - tol || x[i] > b_[i] + tol) return false;
  return true;
}

MaxOracle::MaxOracle(std::vector<OraclePtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ConfigError("max_reduce: empty oracle list");
  for (const auto& p : parts_) {
    if (!p) throw ConfigError("max_reduce: null oracle");
    if (p->dim() != parts_.front()->dim() || p->memory() != parts_.front()->memory())
      throw ConfigError("max_reduce: oracles disagree on dimension or memory");
    lip_ = std::max(lip_, p->lipschitz());
    bound_ = std::max(bound_, p->bound());
  }
}

std::size_t MaxOracle::argmax(const MemoryWindow& w) const {
  std::size_t best = 0;
  double best_v = parts_[0]->value(w);
  for (std::size_t k = 1; k < parts_.size(); ++k) {
    double v = parts_[k]->value(w);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  return best;
}

double MaxOracle::value(const MemoryWindow& w) const { return parts_[argmax(w)]->value(w); }

Vec MaxOracle::grad_wrt_last(const MemoryWindow& w) const { return parts_[argmax(w)]->grad_wrt_last(w); }

Vec MaxOracle::grad_splat(const DecisionVector& x) const {
  return parts_[argmax(splat(x, memory()))]->grad_splat(x);
}

OraclePtr max_reduce(const std::vector<OraclePtr>& oracles) {
  if (oracles.size() == 1) {
    if (!oracles[0]) throw ConfigError("max_reduce: null oracle");
    return oracles[0];
  }
  return std::make_shared<MaxOracle>(oracles);
}

}  // namespace cocom
