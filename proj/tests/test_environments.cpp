#include <doctest.h>

#include <cmath>

#include "cocom/environments.hpp"
#include "support.hpp"

using namespace cocom;
using testing_support::Draw;

TEST_CASE("appendix instance: determinism, ranges and horizon prefixes") {
  for (auto mode : {AppendixAMode::Stochastic, AppendixAMode::AdversarialMixture}) {
    AppendixAParams p;
    p.mode = mode;
    p.T = 500;
    auto a = AppendixAInstance::generate(p, 5);
    auto b = AppendixAInstance::generate(p, 5);
    auto c = AppendixAInstance::generate(p, 6);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_json() != c.to_json());
    for (int t = p.m; t <= p.T; ++t) {
      CHECK(std::abs(a.c(t)[0]) <= p.B());
      CHECK(std::abs(a.d(t)[0]) <= p.B());
      if (mode == AppendixAMode::Stochastic) CHECK(std::abs(a.c(t)[0]) <= p.sigma);
    }
    CHECK_THROWS_AS(a.c(p.m - 1), ContractViolation);
    CHECK_THROWS_AS(a.d(p.T + 1), ContractViolation);
    // a longer horizon extends the same sequence
    AppendixAParams q = p;
    q.T = 1000;
    auto longer = AppendixAInstance::generate(q, 5);
    for (int t = p.m; t <= p.T; ++t) CHECK((longer.c(t) == a.c(t) && longer.d(t) == a.d(t)));
  }
}

TEST_CASE("appendix constants") {
  AppendixAParams p;  // R = 15, sigma = 10, gamma = 3, delta = 1
  InstanceConstants k = AppendixAInstance::generate(p, 1).constants();
  CHECK(k.diam == 30.0);
  CHECK(k.L_f == 60.0);
  CHECK(k.L_g == 30.0);
  CHECK(k.F == doctest::Approx(0.5 * 45.0 * 45.0));
  CHECK(k.G == doctest::Approx(451.0));
  // the bounds hold on sampled points of the set for every round
  auto inst = AppendixAInstance::generate(p, 2);
  Draw rng(2);
  for (int s = 0; s < 2000; ++s) {
    int t = rng.integer(p.m, p.T);
    Vec x{rng.uni(-15, 15)};
    CHECK(inst.lifted_loss(t, x) <= k.F);
    CHECK(std::abs(inst.lifted_constraint(t, x)) <= k.G);
  }
}

TEST_CASE("appendix: the center is feasible and the JSON round trip is exact") {
  AppendixAParams p;
  p.dim = 2;
  p.T = 100;
  p.mode = AppendixAMode::AdversarialMixture;
  auto inst = AppendixAInstance::generate(p, 9);
  CHECK(inst.benchmark_feasible({0.0, 0.0}, p.T));
  auto back = AppendixAInstance::from_json(inst.to_json());
  CHECK(back.to_json() == inst.to_json());
  for (int t = p.m; t <= p.T; ++t) CHECK(back.c(t) == inst.c(t));
  CHECK(back.lifted_loss_total({1.0, -2.0}, p.T) == inst.lifted_loss_total({1.0, -2.0}, p.T));
  // prefix-sum form of the total equals the direct sum
  double direct = 0.0;
  for (int t = p.m; t <= 60; ++t) direct += inst.lifted_loss(t, {1.0, -2.0});
  CHECK(inst.lifted_loss_total({1.0, -2.0}, 60) == doctest::Approx(direct).epsilon(1e-12));
  nlohmann::json bad = inst.to_json();
  bad["c"].erase(0);
  CHECK_THROWS_AS(AppendixAInstance::from_json(bad), ConfigError);
}

TEST_CASE("appendix per-round minimum matches a grid search") {
  AppendixAParams p;
  p.T = 60;
  p.mode = AppendixAMode::AdversarialMixture;
  auto inst = AppendixAInstance::generate(p, 3);
  for (int t = p.m; t <= p.T; ++t) {
    double best = 1e300;
    for (int i = 0; i <= 300000; ++i) {
      Vec x{-15.0 + i * 1e-4};
      if (inst.lifted_constraint(t, x) <= 0.0) best = std::min(best, inst.lifted_loss(t, x));
    }
    // the grid can only be worse, by at most slope * spacing with |x - c| <= 45
    CHECK(inst.per_round_min(t) <= best + 1e-12);
    CHECK(best - inst.per_round_min(t) <= 45.0 * 1e-4);
  }
}

TEST_CASE("separable instance: determinism, prefixes and center feasibility") {
  SeparableParams p;
  p.T = 300;
  p.dim = 2;
  auto a = SeparableInstance::generate(p, 4);
  CHECK(a.to_json() == SeparableInstance::generate(p, 4).to_json());
  CHECK(a.to_json() != SeparableInstance::generate(p, 5).to_json());
  SeparableParams q = p;
  q.T = 600;
  auto longer = SeparableInstance::generate(q, 4);
  for (int t = p.m + 1; t <= p.T; ++t)
    for (int i = 0; i <= p.m; ++i) {
      CHECK(longer.f_slice(t, i).coeff == a.f_slice(t, i).coeff);
      CHECK(longer.g_slice(t, i).offset == a.g_slice(t, i).offset);
    }
  CHECK(a.benchmark_feasible({0.0, 0.0}, p.T));
  for (int t = p.m + 1; t <= p.T; ++t)
    for (int i = 0; i <= p.m; ++i) CHECK(a.g_slice(t, i).value({0.0, 0.0}) <= 0.0);
  // outside the horizon every slice is zero
  CHECK(a.f_slice(p.m, 0).coeff == Vec{0.0, 0.0});
  CHECK(a.g_slice(p.T + 1, 1).offset == 0.0);
  CHECK_THROWS_AS(a.f_slice(5, p.m + 1), ContractViolation);
  auto back = SeparableInstance::from_json(a.to_json());
  CHECK(back.to_json() == a.to_json());
}

TEST_CASE("separable constants against direct evaluation") {
  SeparableParams p;
  p.T = 200;
  p.dim = 2;
  p.m = 3;
  auto inst = SeparableInstance::generate(p, 8);
  InstanceConstants k = inst.constants();
  double lf = 0.0, lg = 0.0, F = 0.0, G = 0.0;
  std::vector<Vec> corners = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  for (int t = p.m + 1; t <= p.T; ++t) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i <= p.m; ++i) {
      a += norm(inst.f_slice(t, i).coeff);
      b += norm(inst.g_slice(t, i).coeff);
    }
    lf = std::max(lf, a);
    lg = std::max(lg, b);
    for (const Vec& x : corners) {
      double fs = 0.0, gs = 0.0;
      for (int i = 0; i <= p.m; ++i) {
        fs += std::abs(inst.f_slice(t, i).value(x));
        gs += std::abs(inst.g_slice(t, i).value(x));
      }
      F = std::max(F, fs);
      G = std::max(G, gs);
    }
  }
  CHECK(k.L_f == doctest::Approx(lf));
  CHECK(k.L_g == doctest::Approx(lg));
  CHECK(k.F == doctest::Approx(F));
  CHECK(k.G == doctest::Approx(G));
  CHECK(k.diam == doctest::Approx(std::sqrt(8.0)));
  // |f_t(window)| <= F on random windows
  Draw rng(1);
  for (int s = 0; s < 1000; ++s) {
    int t = rng.integer(p.m + 1, p.T);
    double v = 0.0;
    for (int i = 0; i <= p.m; ++i) v += inst.f_slice(t, i).value(rng.vec(2, -1, 1));
    CHECK(std::abs(v) <= k.F + 1e-12);
  }
}

TEST_CASE("memoryless separable constraint has only delay-0 slices") {
  SeparableParams p;
  p.T = 50;
  p.memoryless_constraint = true;
  auto inst = SeparableInstance::generate(p, 1);
  for (int t = p.m + 1; t <= p.T; ++t)
    for (int i = 1; i <= p.m; ++i) {
      CHECK(inst.g_slice(t, i).coeff == Vec{0.0});
      CHECK(inst.g_slice(t, i).offset == 0.0);
    }
}

TEST_CASE("predictors") {
  SeparableParams p;
  p.T = 400;
  p.dim = 2;
  auto inst = SeparableInstance::generate(p, 3);
  Predictor zero(Predictor::Kind::Zero), perfect(Predictor::Kind::Perfect);
  Predictor noiseless(Predictor::Kind::Noisy, 0.0, 1), noisy(Predictor::Kind::Noisy, 0.5, 1);
  Draw rng(4);
  double sq = 0.0;
  int n = 0, flips = 0;
  for (int t = p.m + 1; t <= p.T; ++t)
    for (int i = 0; i <= p.m; ++i) {
      Vec x = rng.vec(2, -1, 1);
      const AffineSlice& f = inst.f_slice(t, i);
      const AffineSlice& g = inst.g_slice(t, i);
      SlicePrediction z = zero.predict(inst, t, i, x);
      CHECK(z.f_coeff == Vec{0.0, 0.0});
      CHECK_FALSE(z.active);
      SlicePrediction e = perfect.predict(inst, t, i, x);
      CHECK(e.f_coeff == f.coeff);
      CHECK(e.g_coeff == g.coeff);
      CHECK(e.active == (g.value(x) > 0.0));
      SlicePrediction e0 = noiseless.predict(inst, t, i, x);
      CHECK((e0.f_coeff == e.f_coeff && e0.g_coeff == e.g_coeff && e0.active == e.active));
      SlicePrediction a = noisy.predict(inst, t, i, x), b = noisy.predict(inst, t, i, x);
      CHECK((a.f_coeff == b.f_coeff && a.g_coeff == b.g_coeff && a.active == b.active));
      sq += norm_sq(sub(a.f_coeff, f.coeff));
      n += 2;
      if (a.active != e.active) ++flips;
    }
  // per-coordinate noise variance is scale^2
  CHECK(sq / n == doctest::Approx(0.25).epsilon(0.1));
  CHECK(flips > 0);
  CHECK(flips < n / 4);
  CHECK_THROWS_AS(Predictor(Predictor::Kind::Noisy, -1.0), ConfigError);
}
