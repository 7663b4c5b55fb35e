#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "cocom/core.hpp"

namespace testing_support {

// Test-side randomness; independent of the library generator on purpose.
struct Draw {
  std::mt19937_64 gen;
  explicit Draw(unsigned long long seed) : gen(seed) {}
  double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  cocom::Vec vec(std::size_t d, double lo, double hi) {
    cocom::Vec v(d);
    for (auto& x : v) x = uni(lo, hi);
    return v;
  }
};

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-12) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

// Points a, a + step, ... and b itself, so boundaries are always on the grid.
inline std::vector<double> axis(double a, double b, double step) {
  std::vector<double> out;
  for (int i = 0; a + i * step < b - 1e-15; ++i) out.push_back(a + i * step);
  out.push_back(b);
  return out;
}

// Argmin of a strictly convex objective over a 2-D set by successive grid refinement:
// 0.01 spacing first, then grids shrinking tenfold down to 1e-6. Balls are gridded in
// polar coordinates so that the boundary circle is part of every grid.
template <class F>
cocom::Vec grid_argmin_2d(const cocom::FeasibleSet& set, F objective) {
  const bool box = set.kind() == cocom::FeasibleSet::Kind::Box;
  const double pi = std::acos(-1.0);
  cocom::Vec lo(2), hi(2);
  if (box) {
    lo = set.lo();
    hi = set.hi();
  } else {
    lo = {0.0, -pi};
    hi = {set.radius(), pi};
  }
  auto point = [&](double u, double v) -> cocom::Vec {
    if (box) return {u, v};
    return {set.ball_center()[0] + u * std::cos(v), set.ball_center()[1] + u * std::sin(v)};
  };
  // angular steps are scaled so both coordinates move by about `step`
  const double vscale = box ? 1.0 : 1.0 / set.radius();
  cocom::Vec best{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
  double best_v = objective(point(best[0], best[1]));
  auto scan = [&](double a0, double b0, double a1, double b1, double step) {
    for (double u : axis(a0, b0, step))
      for (double v : axis(a1, b1, step * vscale)) {
        double val = objective(point(u, v));
        if (val < best_v) best_v = val, best = {u, v};
      }
  };
  double step = 0.01;
  scan(lo[0], hi[0], lo[1], hi[1], step);
  while (step > 1e-6) {
    double span = 2 * step;
    step /= 10;
    double a1 = best[1] - span * vscale, b1 = best[1] + span * vscale;
    if (box) a1 = std::max(lo[1], a1), b1 = std::min(hi[1], b1);
    scan(std::max(lo[0], best[0] - span), std::min(hi[0], best[0] + span), a1, b1, step);
  }
  return point(best[0], best[1]);
}

}  // namespace testing_support
