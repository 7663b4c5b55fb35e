#include <doctest.h>

#include <cmath>

#include "cocom/penalty.hpp"
#include "support.hpp"

using namespace cocom;
using testing_support::Draw;

TEST_CASE("penalty values") {
  CHECK(phi_value(Penalty::quadratic(0.5), 2.0) == 2.0);
  CHECK(phi_value(Penalty::exponential(1.0), 0.0) == 0.0);
  CHECK(phi_value(Penalty::exponential(0.5), 2.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
  CHECK_THROWS_AS(phi_value(Penalty::quadratic(1.0), -1e-9), ContractViolation);
  CHECK_THROWS_AS(Penalty::quadratic(0.0), ConfigError);
}

TEST_CASE("penalty derivatives") {
  CHECK(phi_prime(Penalty::quadratic(0.5), 2.0) == 2.0);
  CHECK(phi_prime(Penalty::exponential(1.0), 0.0) == 1.0);
  CHECK_THROWS_AS(phi_prime(Penalty::exponential(1.0), -1.0), ContractViolation);
  Draw rng(2);
  for (int k = 0; k < 200; ++k) {
    Penalty p = k % 2 ? Penalty::quadratic(rng.uni(0.01, 3)) : Penalty::exponential(rng.uni(0.01, 2));
    double V = rng.uni(0.1, 5), h = 1e-5 * std::max(1.0, V);
    double fd = (p.value(V + h) - p.value(V - h)) / (2 * h);
    CHECK(testing_support::close_rel(p.prime(V), fd, 1e-6));
  }
}

TEST_CASE("penalty convexity and monotone derivative") {
  Draw rng(4);
  for (int k = 0; k < 1000; ++k) {
    Penalty p = k % 2 ? Penalty::quadratic(rng.uni(0.01, 3)) : Penalty::exponential(rng.uni(0.01, 2));
    double a = rng.uni(0, 10), b = rng.uni(0, 10);
    CHECK(p.value(0.5 * (a + b)) <= 0.5 * (p.value(a) + p.value(b)) + 1e-12 * p.value(std::max(a, b)));
  }
  for (Penalty p : {Penalty::quadratic(0.3), Penalty::exponential(0.7)}) {
    double prev = p.prime(0.0);
    CHECK(prev >= 0.0);
    for (int i = 1; i <= 1000; ++i) {
      double cur = p.prime(i * 0.01);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("exponential penalty saturates instead of overflowing") {
  Penalty p = Penalty::exponential(1.0);
  CHECK_FALSE(p.saturates(699.0));
  CHECK(p.saturates(701.0));
  CHECK(std::isfinite(p.value(1e6)));
  CHECK(std::isfinite(p.prime(1e6)));
}

TEST_CASE("penalty state history") {
  PenaltyState s(3, 4);
  CHECK(s.now() == 0.0);
  CHECK(s.at(-5) == 0.0);
  CHECK(s.at(2) == 0.0);
  s.advance(1.0);  // round 3
  s.advance(0.0);  // round 4
  s.advance(2.5);  // round 5
  CHECK(s.round() == 5);
  CHECK(s.now() == 3.5);
  CHECK(s.at(3) == 1.0);
  CHECK(s.at(4) == 1.0);
  CHECK(s.at(5) == 3.5);
  CHECK(s.at(1) == 0.0);
  CHECK_THROWS_AS(s.at(6), ContractViolation);
  CHECK_THROWS_AS(s.advance(-0.1), ContractViolation);
  for (int i = 0; i < 10; ++i) s.advance(1.0);
  CHECK_THROWS_AS(s.at(5), ContractViolation);  // fell out of the look-back
  CHECK(s.at(s.round() - 3) == s.now() - 3.0);
}

TEST_CASE("theorem lambda values") {
  LambdaParams p;
  p.T = 4;
  CHECK(theorem_lambda(LambdaTheorem::Thm12, p) == 0.5);
  p = LambdaParams{};
  p.E = 0.0;
  p.G = 1.0;
  p.m = 1;
  p.C = 123.0;
  CHECK(theorem_lambda(LambdaTheorem::Thm4, p) == 0.25);
  p = LambdaParams{2, 1, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
  CHECK(theorem_lambda(LambdaTheorem::Thm3, p) == doctest::Approx(0.5 / (2.0 + std::sqrt(2.0))));
  p = LambdaParams{2, 1, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(theorem_lambda(LambdaTheorem::Thm3, p), ConfigError);
  p = LambdaParams{};
  CHECK_THROWS_AS(theorem_lambda(LambdaTheorem::Thm4, p), ConfigError);
}

TEST_CASE("lambda schedule") {
  LambdaSchedule fixed{LambdaSchedule::Mode::Fixed, 0.3};
  CHECK(fixed.at(1) == 0.3);
  CHECK(fixed.at(1000) == 0.3);
  LambdaSchedule inv{LambdaSchedule::Mode::InvSqrtT, 0.0};
  CHECK(inv.at(4) == 0.5);
  CHECK(inv.at(100) == doctest::Approx(0.1));
}
