#include <doctest.h>

#include "cocom/core.hpp"
#include "cocom/environments.hpp"
#include "cocom/geometry.hpp"
#include "support.hpp"

using namespace cocom;
using testing_support::Draw;

namespace {

OraclePtr affine(double a, double b) {  // a*x - b in one dimension, memory 0
  return std::make_shared<AveragedLinearOracle>(Vec{a}, b, 0, std::abs(a), 100.0);
}

double window_dist(const MemoryWindow& a, const MemoryWindow& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += norm_sq(sub(a.entries()[i], b.entries()[i]));
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("splat builds a constant window") {
  MemoryWindow w = splat({1.0, 2.0}, 2);
  REQUIRE(w.size() == 3);
  for (const auto& e : w.entries()) CHECK(e == Vec{1.0, 2.0});
  MemoryWindow z = splat({0.0}, 0);
  CHECK(z.size() == 1);
  CHECK(z.newest() == Vec{0.0});
}

TEST_CASE("value_splat is value on the splatted window") {
  AveragedQuadraticOracle q({1.5, -2.0}, 3, 10.0, 100.0);
  Vec x{0.25, 4.0};
  CHECK(q.value_splat(x) == q.value(splat(x, 3)));
}

TEST_CASE("memory window keeps the last m+1 pushes") {
  Draw rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int m = rng.integer(0, 5);
    MemoryWindow w(m, {0.0});
    std::vector<double> pushed;
    int k = rng.integer(m + 1, 3 * m + 4);
    for (int i = 0; i < k; ++i) {
      double v = rng.uni(-1, 1);
      pushed.push_back(v);
      w.push({v});
    }
    REQUIRE(w.size() == static_cast<std::size_t>(m + 1));
    for (int i = 0; i <= m; ++i) CHECK(w.entries()[static_cast<std::size_t>(i)][0] == pushed[pushed.size() - m - 1 + i]);
    for (int i = 0; i <= m; ++i) CHECK(w.lag(i)[0] == pushed[pushed.size() - 1 - i]);
  }
}

TEST_CASE("feasible set diameters") {
  FeasibleSet b = FeasibleSet::box({-1.0, 0.0}, {2.0, 4.0});
  CHECK(b.diameter() == doctest::Approx(5.0));
  FeasibleSet ball = FeasibleSet::ball({0.0, 0.0, 0.0}, 15.0);
  CHECK(ball.diameter() == 30.0);
  CHECK_THROWS_AS(FeasibleSet::box({1.0}, {0.0}), ConfigError);
  CHECK_THROWS_AS(FeasibleSet::ball({0.0}, 0.0), ConfigError);
}

TEST_CASE("max_reduce picks the maximizer and breaks ties by index") {
  auto m = max_reduce({affine(1.0, 1.0), affine(-1.0, 1.0)});
  MemoryWindow w = splat({2.0}, 0);
  CHECK(m->value(w) == 1.0);
  CHECK(m->grad_wrt_last(w) == Vec{1.0});

  auto one = affine(3.0, 0.5);
  CHECK(max_reduce({one}).get() == one.get());
  CHECK_THROWS_AS(max_reduce({}), ConfigError);

  // tie at 0 between x and -x: the index-0 gradient must still be a valid subgradient
  auto tie = max_reduce({affine(1.0, 0.0), affine(-1.0, 0.0)});
  Vec g = tie->grad_wrt_last(splat({0.0}, 0));
  CHECK(g == Vec{1.0});
  for (int k = -100; k <= 100; ++k) {
    double y = k * 0.05;
    CHECK(tie->value(splat({y}, 0)) >= tie->value(splat({0.0}, 0)) + g[0] * y - 1e-15);
  }
  CHECK(max_reduce({affine(2.0, 0.0), affine(-1.0, 0.0)})->lipschitz() == 2.0);
}

TEST_CASE("instance oracles respect their bound and Lipschitz constant") {
  Draw rng(11);
  AppendixAParams p;
  p.T = 60;
  p.dim = 2;
  p.mode = AppendixAMode::AdversarialMixture;
  AppendixAInstance inst = AppendixAInstance::generate(p, 3);
  FeasibleSet set = inst.set();
  for (int trial = 0; trial < 1000; ++trial) {
    int t = rng.integer(p.m, p.T);
    auto variant = trial % 2 ? ProblemVariant::CocoM : ProblemVariant::CocoM2;
    for (const OraclePtr& o : {inst.loss(t), inst.constraint(t, variant)}) {
      MemoryWindow w1(p.m, set.center()), w2(p.m, set.center());
      for (int i = 0; i <= p.m; ++i) {
        w1.push(project(set, rng.vec(2, -20, 20)));
        w2.push(project(set, rng.vec(2, -20, 20)));
      }
      CHECK(std::abs(o->value(w1)) <= o->bound());
      CHECK(std::abs(o->value(w1) - o->value(w2)) <= o->lipschitz() * window_dist(w1, w2) + 1e-9);
    }
  }
}

TEST_CASE("grad_splat matches finite differences of the lift") {
  Draw rng(5);
  AppendixAParams p;
  p.T = 40;
  p.dim = 2;
  AppendixAInstance inst = AppendixAInstance::generate(p, 9);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    int t = rng.integer(p.m, p.T);
    OraclePtr o = trial % 2 ? inst.loss(t) : inst.constraint(t, ProblemVariant::CocoM2);
    Vec x = rng.vec(2, -10, 10);
    Vec g = o->grad_splat(x);
    for (std::size_t i = 0; i < 2; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      double fd = (o->value_splat(xp) - o->value_splat(xm)) / (2 * h);
      CHECK(testing_support::close_rel(g[i], fd, 1e-6, 1e-7));
    }
  }
}

TEST_CASE("variant names round-trip") {
  CHECK(parse_variant("coco_m") == ProblemVariant::CocoM);
  CHECK(std::string(to_string(ProblemVariant::CocoM2)) == "coco_m2");
  CHECK_THROWS_AS(parse_variant("coco"), ConfigError);
}
