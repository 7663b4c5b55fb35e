#include "cocom/environments.hpp"

#include <algorithm>
#include <cmath>

#include "cocom/rng.hpp"

namespace cocom {

using nlohmann::json;

json to_json(const InstanceConstants& c) {
  return {{"diam", c.diam}, {"L_f", c.L_f}, {"L_g", c.L_g}, {"F", c.F}, {"G", c.G}};
}

AveragedQuadraticOracle::AveragedQuadraticOracle(Vec c, int m, double lipschitz, double bound)
    : c_(std::move(c)), m_(m), lip_(lipschitz), bound_(bound) {}

double AveragedQuadraticOracle::value(const MemoryWindow& w) const {
  if (w.memory() != m_ || w.dim() != c_.size()) throw ConfigError("quadratic oracle: window shape mismatch");
  double s = 0.0;
  for (const auto& x : w.entries()) s += 0.5 * norm_sq(sub(x, c_));
  return s / (m_ + 1);
}

Vec AveragedQuadraticOracle::grad_wrt_last(const MemoryWindow& w) const {
  return scaled(sub(w.newest(), c_), 1.0 / (m_ + 1));
}

Vec AveragedQuadraticOracle::grad_splat(const DecisionVector& x) const { return sub(x, c_); }

AveragedLinearOracle::AveragedLinearOracle(Vec d, double delta, int m, double lipschitz, double bound)
    : d_(std::move(d)), delta_(delta), m_(m), lip_(lipschitz), bound_(bound) {}

double AveragedLinearOracle::value(const MemoryWindow& w) const {
  if (w.memory() != m_ || w.dim() != d_.size()) throw ConfigError("linear oracle: window shape mismatch");
  double s = 0.0;
  for (const auto& x : w.entries()) s += dot(d_, x);
  return s / (m_ + 1) - delta_;
}

Vec AveragedLinearOracle::grad_wrt_last(const MemoryWindow&) const { return scaled(d_, 1.0 / (m_ + 1)); }

const char* to_string(AppendixAMode m) { return m == AppendixAMode::Stochastic ? "stochastic" : "adversarial"; }

AppendixAMode parse_appendix_a_mode(const std::string& s) {
  if (s == "stochastic") return AppendixAMode::Stochastic;
  if (s == "adversarial" || s == "adversarial_mixture") return AppendixAMode::AdversarialMixture;
  throw ConfigError("unknown appendix_a mode: " + s);
}

void AppendixAParams::validate() const {
  if (m < 0 || T < m) throw ConfigError("appendix_a: need T >= m >= 0");
  if (!(sigma > 0.0) || !(delta > 0.0) || !(R > 0.0) || !(gamma > 0.0))
    throw ConfigError("appendix_a: sigma, delta, R, gamma must be positive");
  if (dim < 1) throw ConfigError("appendix_a: dim must be >= 1");
}

json to_json(const AppendixAParams& p) {
  return {{"m", p.m},         {"T", p.T},         {"R", p.R},     {"sigma", p.sigma},
          {"delta", p.delta}, {"gamma", p.gamma}, {"dim", p.dim}, {"mode", to_string(p.mode)}};
}

AppendixAParams appendix_a_params_from_json(const json& j) {
  AppendixAParams p;
  p.m = j.value("m", p.m);
  p.T = j.value("T", p.T);
  p.R = j.value("R", p.R);
  p.sigma = j.value("sigma", p.sigma);
  p.delta = j.value("delta", p.delta);
  p.gamma = j.value("gamma", p.gamma);
  p.dim = j.value("dim", p.dim);
  if (j.contains("mode")) p.mode = parse_appendix_a_mode(j.at("mode").get<std::string>());
  p.validate();
  return p;
}

namespace {

double draw_coefficient(Rng& rng, const AppendixAParams& p) {
  if (p.mode == AppendixAMode::Stochastic || rng.uniform01() < 0.4) return rng.uniform(-p.sigma, p.sigma);
  // Gaussian branch, redrawn until it lands in [-B, B]
  for (;;) {
    double z = p.sigma * rng.normal();
    if (std::abs(z) <= p.B()) return z;
  }
}

// Euclidean projection of c onto {||x|| <= R} intersected with {<d, x> <= delta}, delta > 0.
Vec project_ball_halfspace(const Vec& c, double R, const Vec& d, double delta) {
  double dd = norm_sq(d);
  double nc = norm(c);
  if (dot(d, c) <= delta && nc <= R) return c;
  Vec a = nc > R ? scaled(c, R / nc) : c;
  if (dot(d, a) <= delta) return a;
  Vec b = c;
  axpy(-(dot(d, c) - delta) / dd, d, b);
  if (norm(b) <= R) return b;
  // both constraints active: nearest point of the sphere-hyperplane intersection
  Vec p0 = scaled(d, delta / dd);
  double r2 = std::max(0.0, R * R - norm_sq(p0));
  Vec u = sub(c, p0);
  axpy(-dot(u, d) / dd, d, u);
  double nu = norm(u);
  if (nu == 0.0) {
    // c - p0 parallel to d; any orthogonal direction is optimal
    u.assign(d.size(), 0.0);
    if (d.size() == 1) return p0;
    std::size_t k = std::abs(d[0]) <= std::abs(d[1]) ? 0 : 1;
    u[k] = 1.0;
    axpy(-dot(u, d) / dd, d, u);
    nu = norm(u);
  }
  Vec x = p0;
  axpy(std::sqrt(r2) / nu, u, x);
  return x;
}

}  // namespace

AppendixAInstance AppendixAInstance::generate(const AppendixAParams& params, std::uint64_t seed) {
  params.validate();
  AppendixAInstance inst;
  inst.p_ = params;
  inst.seed_ = seed;
  Rng rng(seed);
  std::size_t n = static_cast<std::size_t>(params.T - params.m + 1);
  inst.c_.reserve(n);
  inst.d_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vec c(inst.dim()), d(inst.dim());
    for (double& v : c) v = draw_coefficient(rng, params);
    for (double& v : d) v = draw_coefficient(rng, params);
    inst.c_.push_back(std::move(c));
    inst.d_.push_back(std::move(d));
  }
  inst.build_prefix();
  return inst;
}

void AppendixAInstance::build_prefix() {
  c_prefix_.assign(c_.size(), Vec(dim(), 0.0));
  csq_prefix_.assign(c_.size(), 0.0);
  Vec run(dim(), 0.0);
  double sq = 0.0;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    axpy(1.0, c_[k], run);
    sq += norm_sq(c_[k]);
    c_prefix_[k] = run;
    csq_prefix_[k] = sq;
  }
}

const Vec& AppendixAInstance::c(int t) const {
  if (t < p_.m || t > p_.T) throw ContractViolation("appendix_a: round out of range");
  return c_[static_cast<std::size_t>(t - p_.m)];
}

const Vec& AppendixAInstance::d(int t) const {
  if (t < p_.m || t > p_.T) throw ContractViolation("appendix_a: round out of range");
  return d_[static_cast<std::size_t>(t - p_.m)];
}

FeasibleSet AppendixAInstance::set() const {
  if (p_.dim == 1) return FeasibleSet::cube(1, -p_.R, p_.R);
  return FeasibleSet::ball(Vec(dim(), 0.0), p_.R);
}

InstanceConstants AppendixAInstance::constants() const {
  InstanceConstants k;
  double sd = std::sqrt(static_cast<double>(p_.dim));
  k.diam = 2.0 * p_.R;
  k.L_f = k.diam + p_.B() * sd;
  k.L_g = p_.B() * sd;
  k.F = 0.5 * (p_.R + p_.B() * sd) * (p_.R + p_.B() * sd);
  k.G = p_.B() * sd * p_.R + p_.delta;
  return k;
}

OraclePtr AppendixAInstance::loss(int t) const {
  auto k = constants();
  return std::make_shared<AveragedQuadraticOracle>(c(t), p_.m, k.L_f, k.F);
}

OraclePtr AppendixAInstance::constraint(int t, ProblemVariant v) const {
  auto k = constants();
  OraclePtr g = std::make_shared<AveragedLinearOracle>(d(t), p_.delta, p_.m, k.L_g, k.G);
  if (v == ProblemVariant::CocoM) return std::make_shared<NewestDecisionOracle>(g);
  return g;
}

double AppendixAInstance::lifted_loss(int t, const Vec& x) const { return 0.5 * norm_sq(sub(x, c(t))); }

double AppendixAInstance::lifted_constraint(int t, const Vec& x) const { return dot(d(t), x) - p_.delta; }

double AppendixAInstance::lifted_loss_total(const Vec& x, int t_end) const {
  if (t_end < p_.m) return 0.0;
  std::size_t k = static_cast<std::size_t>(std::min(t_end, p_.T) - p_.m);
  double n = static_cast<double>(k + 1);
  return 0.5 * n * norm_sq(x) - dot(x, c_prefix_[k]) + 0.5 * csq_prefix_[k];
}

bool AppendixAInstance::benchmark_feasible(const Vec& x, int t_end, double tol) const {
  if (!set().contains(x, tol)) return false;
  for (int t = p_.m; t <= std::min(t_end, p_.T); ++t)
    if (lifted_constraint(t, x) > tol) return false;
  return true;
}

double AppendixAInstance::per_round_min(int t) const {
  Vec x = project_ball_halfspace(c(t), p_.R, d(t), p_.delta);
  return lifted_loss(t, x);
}

double AppendixAInstance::initial_violation() const {
  return std::max(0.0, lifted_constraint(p_.m, set().center()));
}

json AppendixAInstance::to_json() const {
  return {{"family", "appendix_a"}, {"params", cocom::to_json(p_)}, {"seed", seed_},
          {"generator", Rng::kName}, {"first_round", p_.m}, {"c", c_}, {"d", d_}};
}

AppendixAInstance AppendixAInstance::from_json(const json& j) {
  if (j.value("family", "") != "appendix_a") throw ConfigError("instance json: not an appendix_a instance");
  AppendixAInstance inst;
  inst.p_ = appendix_a_params_from_json(j.at("params"));
  inst.seed_ = j.value("seed", std::uint64_t{0});
  inst.c_ = j.at("c").get<std::vector<Vec>>();
  inst.d_ = j.at("d").get<std::vector<Vec>>();
  std::size_t n = static_cast<std::size_t>(inst.p_.T - inst.p_.m + 1);
  if (inst.c_.size() != n || inst.d_.size() != n) throw ConfigError("instance json: coefficient count mismatch");
  for (std::size_t k = 0; k < n; ++k)
    if (inst.c_[k].size() != inst.dim() || inst.d_[k].size() != inst.dim())
      throw ConfigError("instance json: coefficient dimension mismatch");
  inst.build_prefix();
  return inst;
}

void SeparableParams::validate() const {
  if (m < 0 || T < m) throw ConfigError("separable: need T >= m >= 0");
  if (dim < 1) throw ConfigError("separable: dim must be >= 1");
  if (!(half_width > 0.0)) throw ConfigError("separable: half_width must be positive");
  if (loss_noise < 0.0 || constraint_noise < 0.0 || margin_max < 0.0)
    throw ConfigError("separable: noise levels and margin must be nonnegative");
}

json to_json(const SeparableParams& p) {
  return {{"m", p.m},
          {"T", p.T},
          {"dim", p.dim},
          {"half_width", p.half_width},
          {"loss_drift", p.loss_drift},
          {"loss_noise", p.loss_noise},
          {"constraint_bias", p.constraint_bias},
          {"constraint_noise", p.constraint_noise},
          {"margin_max", p.margin_max},
          {"memoryless_constraint", p.memoryless_constraint}};
}

SeparableParams separable_params_from_json(const json& j) {
  SeparableParams p;
  p.m = j.value("m", p.m);
  p.T = j.value("T", p.T);
  p.dim = j.value("dim", p.dim);
  p.half_width = j.value("half_width", p.half_width);
  p.loss_drift = j.value("loss_drift", p.loss_drift);
  p.loss_noise = j.value("loss_noise", p.loss_noise);
  p.constraint_bias = j.value("constraint_bias", p.constraint_bias);
  p.constraint_noise = j.value("constraint_noise", p.constraint_noise);
  p.margin_max = j.value("margin_max", p.margin_max);
  p.memoryless_constraint = j.value("memoryless_constraint", p.memoryless_constraint);
  p.validate();
  return p;
}

SeparableInstance SeparableInstance::generate(const SeparableParams& params, std::uint64_t seed) {
  params.validate();
  SeparableInstance inst;
  inst.p_ = params;
  inst.seed_ = seed;
  const std::size_t d = inst.dim();
  const double k = 1.0 / (params.m + 1);
  inst.zero_ = AffineSlice{Vec(d, 0.0), 0.0};
  Rng rng(seed);
  std::size_t n = static_cast<std::size_t>(params.T - params.m) * static_cast<std::size_t>(params.m + 1);
  inst.f_.reserve(n);
  inst.g_.reserve(n);
  Vec center = inst.set().center();
  for (int t = params.m + 1; t <= params.T; ++t) {
    for (int i = 0; i <= params.m; ++i) {
      AffineSlice f{Vec(d), 0.0}, g{Vec(d), 0.0};
      for (double& v : f.coeff) v = k * (params.loss_drift + params.loss_noise * rng.uniform(-1.0, 1.0));
      f.offset = k * params.loss_noise * rng.uniform(-1.0, 1.0);
      for (double& v : g.coeff) v = k * (params.constraint_bias + params.constraint_noise * rng.uniform(-1.0, 1.0));
      double slack = k * rng.uniform(0.0, params.margin_max);
      g.offset = -dot(g.coeff, center) - slack;
      if (params.memoryless_constraint && i > 0) g = inst.zero_;
      inst.f_.push_back(std::move(f));
      inst.g_.push_back(std::move(g));
    }
  }
  inst.compute_constants();
  return inst;
}

std::size_t SeparableInstance::idx(int t, int i) const {
  return static_cast<std::size_t>(t - p_.m - 1) * static_cast<std::size_t>(p_.m + 1) + static_cast<std::size_t>(i);
}

const AffineSlice& SeparableInstance::f_slice(int t, int i) const {
  if (i < 0 || i > p_.m) throw ContractViolation("separable: delay out of range");
  if (t <= p_.m || t > p_.T) return zero_;
  return f_[idx(t, i)];
}

const AffineSlice& SeparableInstance::g_slice(int t, int i) const {
  if (i < 0 || i > p_.m) throw ContractViolation("separable: delay out of range");
  if (t <= p_.m || t > p_.T) return zero_;
  return g_[idx(t, i)];
}

FeasibleSet SeparableInstance::set() const { return FeasibleSet::cube(dim(), -p_.half_width, p_.half_width); }

namespace {

// max over the box of sum_k |<a_k, x> + b_k|; convex, so attained at a vertex
double max_abs_sum_over_box(const std::vector<const AffineSlice*>& slices, const FeasibleSet& box) {
  const std::size_t d = box.dim();
  if (d > 16) {
    double s = 0.0;
    Vec c = box.center();
    for (const auto* sl : slices) {
      double l1 = 0.0;
      for (std::size_t j = 0; j < d; ++j) l1 += std::abs(sl->coeff[j]) * 0.5 * (box.hi()[j] - box.lo()[j]);
      s += std::abs(sl->value(c)) + l1;
    }
    return s;
  }
  double best = 0.0;
  Vec v(d);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    for (std::size_t j = 0; j < d; ++j) v[j] = (mask >> j) & 1 ? box.hi()[j] : box.lo()[j];
    double s = 0.0;
    for (const auto* sl : slices) s += std::abs(sl->value(v));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

void SeparableInstance::compute_constants() {
  FeasibleSet box = set();
  constants_ = InstanceConstants{};
  constants_.diam = box.diameter();
  f_coeff_total_.assign(dim(), 0.0);
  f_offset_total_ = 0.0;
  std::vector<const AffineSlice*> fs, gs;
  for (int t = p_.m + 1; t <= p_.T; ++t) {
    fs.clear();
    gs.clear();
    double lf = 0.0, lg = 0.0;
    for (int i = 0; i <= p_.m; ++i) {
      fs.push_back(&f_slice(t, i));
      gs.push_back(&g_slice(t, i));
      lf += norm(f_slice(t, i).coeff);
      lg += norm(g_slice(t, i).coeff);
      axpy(1.0, f_slice(t, i).coeff, f_coeff_total_);
      f_offset_total_ += f_slice(t, i).offset;
    }
    constants_.L_f = std::max(constants_.L_f, lf);
    constants_.L_g = std::max(constants_.L_g, lg);
    constants_.F = std::max(constants_.F, max_abs_sum_over_box(fs, box));
    constants_.G = std::max(constants_.G, max_abs_sum_over_box(gs, box));
  }
}

double SeparableInstance::lifted_loss(int t, const Vec& x) const {
  double s = 0.0;
  for (int i = 0; i <= p_.m; ++i) s += f_slice(t, i).value(x);
  return s;
}

double SeparableInstance::lifted_constraint(int t, const Vec& x) const {
  double s = 0.0;
  for (int i = 0; i <= p_.m; ++i) s += g_slice(t, i).value(x);
  return s;
}

double SeparableInstance::lifted_loss_total(const Vec& x, int t_end) const {
  if (t_end >= p_.T) return dot(f_coeff_total_, x) + f_offset_total_;
  double s = 0.0;
  for (int t = p_.m + 1; t <= t_end; ++t) s += lifted_loss(t, x);
  return s;
}

bool SeparableInstance::benchmark_feasible(const Vec& x, int t_end, double tol) const {
  if (!set().contains(x, tol)) return false;
  for (int t = p_.m + 1; t <= std::min(t_end, p_.T); ++t)
    for (int i = 0; i <= p_.m; ++i)
      if (g_slice(t, i).value(x) > tol) return false;
  return true;
}

std::optional<double> SeparableInstance::per_round_min(int t) const {
  if (p_.dim != 1) return std::nullopt;
  double A = 0.0, O = 0.0, Bc = 0.0, S = 0.0;
  for (int i = 0; i <= p_.m; ++i) {
    A += f_slice(t, i).coeff[0];
    O += f_slice(t, i).offset;
    Bc += g_slice(t, i).coeff[0];
    S += g_slice(t, i).offset;
  }
  double lo = -p_.half_width, hi = p_.half_width;
  if (Bc > 0.0) hi = std::min(hi, -S / Bc);
  else if (Bc < 0.0) lo = std::max(lo, -S / Bc);
  else if (S > 0.0) return std::nullopt;
  if (lo > hi) return std::nullopt;
  double x = A > 0.0 ? lo : (A < 0.0 ? hi : 0.5 * (lo + hi));
  return A * x + O;
}

json SeparableInstance::to_json() const {
  auto slices = [](const std::vector<AffineSlice>& v) {
    json arr = json::array();
    for (const auto& s : v) arr.push_back({{"coeff", s.coeff}, {"offset", s.offset}});
    return arr;
  };
  return {{"family", "separable"}, {"params", cocom::to_json(p_)}, {"seed", seed_},
          {"generator", Rng::kName}, {"f", slices(f_)}, {"g", slices(g_)}};
}

SeparableInstance SeparableInstance::from_json(const json& j) {
  if (j.value("family", "") != "separable") throw ConfigError("instance json: not a separable instance");
  SeparableInstance inst;
  inst.p_ = separable_params_from_json(j.at("params"));
  inst.seed_ = j.value("seed", std::uint64_t{0});
  inst.zero_ = AffineSlice{Vec(inst.dim(), 0.0), 0.0};
  auto read = [&](const json& arr, std::vector<AffineSlice>& out) {
    for (const auto& s : arr) {
      AffineSlice a{s.at("coeff").get<Vec>(), s.at("offset").get<double>()};
      if (a.coeff.size() != inst.dim()) throw ConfigError("instance json: slice dimension mismatch");
      out.push_back(std::move(a));
    }
  };
  read(j.at("f"), inst.f_);
  read(j.at("g"), inst.g_);
  std::size_t n = static_cast<std::size_t>(inst.p_.T - inst.p_.m) * static_cast<std::size_t>(inst.p_.m + 1);
  if (inst.f_.size() != n || inst.g_.size() != n) throw ConfigError("instance json: slice count mismatch");
  inst.compute_constants();
  return inst;
}

Predictor::Predictor(Kind kind, double scale, std::uint64_t seed) : kind_(kind), scale_(scale), seed_(seed) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ConfigError("predictor scale must be finite and >= 0");
}

SlicePrediction Predictor::predict(const SeparableInstance& inst, int round, int delay, const Vec& point) const {
  const AffineSlice& f = inst.f_slice(round, delay);
  const AffineSlice& g = inst.g_slice(round, delay);
  SlicePrediction out;
  if (kind_ == Kind::Zero) {
    out.f_coeff.assign(inst.dim(), 0.0);
    out.g_coeff.assign(inst.dim(), 0.0);
    return out;
  }
  out.f_coeff = f.coeff;
  out.g_coeff = g.coeff;
  double gv = g.value(point);
  out.active = gv > 0.0;
  if (kind_ == Kind::Perfect || scale_ == 0.0) return out;

  // one stream per slice, so repeated queries agree on the noise
  Rng rng = Rng::derive(seed_, static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(delay));
  for (double& v : out.f_coeff) v += scale_ * rng.normal();
  bool structural_zero = g.offset == 0.0 && norm_sq(g.coeff) == 0.0;
  Vec g_noise(inst.dim());
  for (double& v : g_noise) v = scale_ * rng.normal();
  double u = rng.uniform01();
  if (structural_zero) return out;
  axpy(1.0, g_noise, out.g_coeff);
  double reach = norm(g.coeff) * inst.set().max_radius() + 1e-12;
  double p_flip = 0.5 * (1.0 - std::exp(-scale_)) * std::exp(-std::abs(gv) / reach);
  if (u < p_flip) out.active = !out.active;
  return out;
}

const char* to_string(Predictor::Kind k) {
  switch (k) {
    case Predictor::Kind::Perfect: return "perfect";
    case Predictor::Kind::Noisy: return "noisy";
    case Predictor::Kind::Zero: return "zero";
  }
  return "?";
}

Predictor::Kind parse_predictor_kind(const std::string& s) {
  if (s == "perfect") return Predictor::Kind::Perfect;
  if (s == "noisy") return Predictor::Kind::Noisy;
  if (s == "zero") return Predictor::Kind::Zero;
  throw ConfigError("unknown predictor kind: " + s);
}

}  // namespace cocom
