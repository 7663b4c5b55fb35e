#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace cocom {

using Vec = std::vector<double>;
using DecisionVector = Vec;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class ProblemVariant { CocoM, CocoM2 };

const char* to_string(ProblemVariant v);
ProblemVariant parse_variant(const std::string& s);

// small dense helpers
double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double norm_sq(const Vec& a);
double dist(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double s);
void axpy(double a, const Vec& x, Vec& y);  // y += a*x
bool all_finite(const Vec& a);
void require_same_dim(const Vec& a, const Vec& b, const char* what);

// Holds (x_{t-m}, ..., x_t), oldest first.
class MemoryWindow {
 public:
  MemoryWindow(int m, const DecisionVector& fill);

  int memory() const { return m_; }
  std::size_t dim() const { return entries_.front().size(); }
  std::size_t size() const { return entries_.size(); }

  const std::vector<DecisionVector>& entries() const { return entries_; }
  const DecisionVector& newest() const { return entries_.back(); }
  const DecisionVector& oldest() const { return entries_.front(); }
  // lag(i) = x_{t-i}
  const DecisionVector& lag(int i) const;

  void push(const DecisionVector& x);

 private:
  int m_;
  std::vector<DecisionVector> entries_;
};

MemoryWindow splat(const DecisionVector& x, int m);

class FeasibleSet {
 public:
  enum class Kind { Box, Ball };

  static FeasibleSet box(Vec lo, Vec hi);
  static FeasibleSet cube(std::size_t d, double lo, double hi);
  static FeasibleSet ball(Vec center, double radius);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return a_.size(); }
  double diameter() const { return diameter_; }
  Vec center() const;
  // largest ||x - center|| over the set
  double max_radius() const;
  bool contains(const Vec& x, double tol = 1e-12) const;

  const Vec& lo() const { return a_; }
  const Vec& hi() const { return b_; }
  const Vec& ball_center() const { return a_; }
  double radius() const { return radius_; }

 private:
  FeasibleSet() = default;
  Kind kind_ = Kind::Box;
  Vec a_, b_;
  double radius_ = 0.0;
  double diameter_ = 0.0;
};

class MemoryFunctionOracle {
 public:
  virtual ~MemoryFunctionOracle() = default;

  virtual std::size_t dim() const = 0;
  virtual int memory() const = 0;
  virtual double value(const MemoryWindow& w) const = 0;
  virtual Vec grad_wrt_last(const MemoryWindow& w) const = 0;
  virtual Vec grad_splat(const DecisionVector& x) const = 0;
  virtual double lipschitz() const = 0;
  virtual double bound() const = 0;

  double value_splat(const DecisionVector& x) const { return value(splat(x, memory())); }
};

using OraclePtr = std::shared_ptr<const MemoryFunctionOracle>;

// Pointwise maximum of k oracles; gradients come from the lowest-index maximizer.
class MaxOracle final : public MemoryFunctionOracle {
 public:
  explicit MaxOracle(std::vector<OraclePtr> parts);

  std::size_t dim() const override { return parts_.front()->dim(); }
  int memory() const override { return parts_.front()->memory(); }
  double value(const MemoryWindow& w) const override;
  Vec grad_wrt_last(const MemoryWindow& w) const override;
  Vec grad_splat(const DecisionVector& x) const override;
  double lipschitz() const override { return lip_; }
  double bound() const override { return bound_; }

 private:
  std::size_t argmax(const MemoryWindow& w) const;
  std::vector<OraclePtr> parts_;
  double lip_ = 0.0;
  double bound_ = 0.0;
};

OraclePtr max_reduce(const std::vector<OraclePtr>& oracles);

struct RoundRecord {
  int t = 0;
  DecisionVector x;
  double f_mem = 0.0;            // f_t on the window
  double g_mem = 0.0;            // g_t on the window (COCO-M: g_t(x_t))
  double g_plus_recorded = 0.0;  // increment applied to the learner's V
  double V = 0.0;                // learner's cumulative violation after the round
  double eta_or_mu = 0.0;
  double eps_f = 0.0;
  double eps_g = 0.0;
  double eps_g_literal = 0.0;
  double eps_Z = 0.0;
  double f_lift = 0.0;        // f_t(x_t, ..., x_t)
  double g_lift = 0.0;        // g_t(x_t, ..., x_t)
  double g_plus_true = 0.0;   // CCV increment of the variant
  double surrogate = 0.0;     // OGD: L_t(x_t)
  double grad_norm = 0.0;     // OGD: ||grad L_t(x_t)||
  double phi_prime = 0.0;     // multiplier used this round
  double lambda = 0.0;
  bool saturated = false;
  int epoch = 1;
};

}  // namespace cocom
