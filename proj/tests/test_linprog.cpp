#include <cmath>
#include <vector>

#include "doctest.h"
#include "ssctm/linprog.hpp"
#include "ssctm/rng.hpp"

using namespace ssctm;

TEST_CASE("box-constrained maximum") {
  LpResult res = solve_lp_max({{1, 0}, {0, 1}}, {1, 2}, {1, 1});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(3.0));
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(2.0));
}

TEST_CASE("binding interior vertex") {
  // max 2x + 3y s.t. x + y <= 4, x + 3y <= 6: optimum 9 at (3, 1).
  LpResult res = solve_lp_max({{1, 1}, {1, 3}}, {4, 6}, {2, 3});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(9.0));
  CHECK(res.x[0] == doctest::Approx(3.0));
  CHECK(res.x[1] == doctest::Approx(1.0));
}

TEST_CASE("phase one handles negative right-hand sides") {
  // max x s.t. -x <= -2, x <= 5  =>  x in [2, 5], optimum 5.
  LpResult res = solve_lp_max({{-1}, {1}}, {-2, 5}, {1});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(5.0));

  // Minimize x over the same set by negating the objective.
  res = solve_lp_max({{-1}, {1}}, {-2, 5}, {-1});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(-2.0));
  CHECK(res.x[0] == doctest::Approx(2.0));
}

TEST_CASE("infeasible systems are reported") {
  // x <= 1 and -x <= -3 (x >= 3) cannot both hold.
  LpResult res = solve_lp_max({{1}, {-1}}, {1, -3}, {1});
  CHECK(res.status == LpStatus::kInfeasible);
}

TEST_CASE("unbounded directions are reported") {
  LpResult res = solve_lp_max({{-1}}, {1}, {1});
  CHECK(res.status == LpStatus::kUnbounded);

  // Bounded in x, unbounded in y with positive objective on y.
  res = solve_lp_max({{1, 0}}, {4}, {1, 1});
  CHECK(res.status == LpStatus::kUnbounded);
}

TEST_CASE("degenerate vertices do not cycle") {
  // Three constraints meeting at the same point.
  LpResult res = solve_lp_max({{1, 1}, {1, 0}, {0, 1}, {2, 2}}, {2, 1, 1, 4},
                              {1, 1});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(2.0));
}

TEST_CASE("zero objective reports feasibility") {
  LpResult res = solve_lp_max({{1, 1}}, {1}, {0, 0});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(0.0));
}

TEST_CASE("equality encoded as opposing inequalities") {
  // x + y = 3 (two inequalities), maximize x - y subject to x <= 2.
  LpResult res = solve_lp_max({{1, 1}, {-1, -1}, {1, 0}}, {3, -3, 2}, {1, -1});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.x[0] == doctest::Approx(2.0));
  CHECK(res.x[1] == doctest::Approx(1.0));
  CHECK(res.objective == doctest::Approx(1.0));
}

TEST_CASE("random LPs agree with brute-force vertex enumeration") {
  // Small dense instances with a bounding box so the optimum is attained at
  // a vertex; enumerate all constraint pairs in 2-D as the oracle.
  SplitMix64 rng(2024u);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3 + rng.next_index(3);
    std::vector<std::vector<double>> a(m, std::vector<double>(2));
    std::vector<double> b(m), c = {rng.next_range(-2, 2), rng.next_range(-2, 2)};
    for (int i = 0; i < m; ++i) {
      a[i][0] = rng.next_range(-1, 1);
      a[i][1] = rng.next_range(-1, 1);
      b[i] = rng.next_range(0.2, 3.0);  // keeps the origin feasible
    }
    a.push_back({1, 0});
    b.push_back(10);
    a.push_back({0, 1});
    b.push_back(10);

    LpResult res = solve_lp_max(a, b, c);
    REQUIRE(res.status == LpStatus::kOptimal);

    // Oracle: scan all vertices (pairwise intersections plus the axes).
    const int rows = static_cast<int>(a.size());
    double best = 0.0;  // origin is feasible
    auto consider = [&](double x, double y) {
      if (x < -1e-9 || y < -1e-9) return;
      for (int i = 0; i < rows; ++i)
        if (a[i][0] * x + a[i][1] * y > b[i] + 1e-7) return;
      best = std::max(best, c[0] * x + c[1] * y);
    };
    for (int i = 0; i < rows; ++i) {
      for (int j = i + 1; j < rows; ++j) {
        const double det = a[i][0] * a[j][1] - a[i][1] * a[j][0];
        if (std::abs(det) < 1e-9) continue;
        consider((b[i] * a[j][1] - b[j] * a[i][1]) / det,
                 (a[i][0] * b[j] - a[j][0] * b[i]) / det);
      }
      if (std::abs(a[i][0]) > 1e-9) consider(b[i] / a[i][0], 0.0);
      if (std::abs(a[i][1]) > 1e-9) consider(0.0, b[i] / a[i][1]);
    }
    consider(0.0, 0.0);

    CHECK(res.objective == doctest::Approx(best).epsilon(1e-6));
    // The reported solution must itself be feasible.
    for (int i = 0; i < rows; ++i)
      CHECK(a[i][0] * res.x[0] + a[i][1] * res.x[1] <= b[i] + 1e-7);
  }
}
