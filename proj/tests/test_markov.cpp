#include <cmath>
#include <vector>

#include "doctest.h"
#include "ssctm/errors.hpp"
#include "ssctm/markov.hpp"
#include "ssctm/rng.hpp"
#include "testutil.hpp"

using namespace ssctm;

TEST_CASE("steady state of a symmetric two-mode chain is uniform") {
  std::vector<double> p = steady_state({{-1, 1}, {1, -1}});
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("steady state of the four-mode product chain is uniform") {
  std::vector<double> p = steady_state(testutil::four_mode_base_model().lambda);
  REQUIRE(p.size() == 4);
  for (double pi : p) CHECK(pi == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("steady state of a birth-death chain matches detailed balance") {
  // pi_0 * 1 = pi_1 * 2 and pi_1 * 1 = pi_2 * 2  =>  pi = (4, 2, 1) / 7
  std::vector<double> p =
      steady_state({{-1, 1, 0}, {2, -3, 1}, {0, 2, -2}});
  CHECK(p[0] == doctest::Approx(4.0 / 7).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(2.0 / 7).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(1.0 / 7).epsilon(1e-12));
}

TEST_CASE("steady state is a left null vector within tight residual") {
  SplitMix64 rng(7u);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = testutil::random_model(rng, 1, 4);
    std::vector<double> p = steady_state(m.lambda);
    const int n = static_cast<int>(p.size());
    double sum = 0.0;
    for (double pi : p) {
      CHECK(pi >= 0.0);
      sum += pi;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < n; ++j) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += p[i] * m.lambda[i][j];
      CHECK(std::abs(dot) < 1e-8);
    }
  }
}

TEST_CASE("reducible chains are detected") {
  CHECK(!is_ergodic({{-1, 1}, {0, 0}}));             // absorbing mode
  CHECK(!is_ergodic({{0, 0}, {0, 0}}));              // no transitions at all
  CHECK(is_ergodic({{-1, 1}, {1, -1}}));
  CHECK(is_ergodic({{-1.0, 1.0, 0.0},                // one-directional ring
                    {0.0, -1.0, 1.0},
                    {1.0, 0.0, -1.0}}));
  CHECK_THROWS_AS(steady_state({{0, 0}, {0, 0}}), SingularSystemError);
}

TEST_CASE("single-mode chain has trivial steady state") {
  std::vector<double> p = steady_state({{0.0}});
  REQUIRE(p.size() == 1);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(is_ergodic({{0.0}}));
}

TEST_CASE("mode paths are well formed and reproducible") {
  auto lambda = testutil::four_mode_base_model().lambda;
  SplitMix64 rng_a(123u), rng_b(123u);
  ModePath a = sample_mode_path(lambda, 0, 50.0, rng_a);
  ModePath b = sample_mode_path(lambda, 0, 50.0, rng_b);

  REQUIRE(a.jumps.size() == b.jumps.size());
  for (std::size_t j = 0; j < a.jumps.size(); ++j) {
    CHECK(a.jumps[j].t == b.jumps[j].t);  // bitwise determinism
    CHECK(a.jumps[j].to == b.jumps[j].to);
  }

  double prev = 0.0;
  int cur = a.initial_mode;
  for (const auto& jump : a.jumps) {
    CHECK(jump.t > prev);
    CHECK(jump.t <= a.horizon);
    CHECK(jump.to != cur);  // the embedded chain never self-loops
    prev = jump.t;
    cur = jump.to;
  }
}

TEST_CASE("mode_at is right-continuous and consistent with jumps") {
  ModePath path;
  path.horizon = 10.0;
  path.initial_mode = 2;
  path.jumps = {{1.0, 0}, {4.0, 3}, {7.5, 1}};
  CHECK(path.mode_at(0.0) == 2);
  CHECK(path.mode_at(0.999) == 2);
  CHECK(path.mode_at(1.0) == 0);
  CHECK(path.mode_at(3.9) == 0);
  CHECK(path.mode_at(4.0) == 3);
  CHECK(path.mode_at(7.5) == 1);
  CHECK(path.mode_at(10.0) == 1);
}

TEST_CASE("long-run occupancies approach the steady state") {
  auto lambda = testutil::two_cell_model().lambda;
  std::vector<double> p = steady_state(lambda);
  SplitMix64 rng(99u);
  ModePath path = sample_mode_path(lambda, 0, 2000.0, rng);
  CHECK(path.occupancy(0) == doctest::Approx(p[0]).epsilon(0.05));
  CHECK(path.occupancy(1) == doctest::Approx(p[1]).epsilon(0.05));
  CHECK(path.occupancy(0) + path.occupancy(1) == doctest::Approx(1.0));
}

TEST_CASE("absorbing rows dwell forever") {
  // Mode 1 has zero rates: once entered, the path must never leave it.
  std::vector<std::vector<double>> lambda = {{-2, 2}, {0, 0}};
  SplitMix64 rng(5u);
  ModePath path = sample_mode_path(lambda, 0, 100.0, rng);
  REQUIRE(path.jumps.size() == 1);
  CHECK(path.jumps[0].to == 1);
  CHECK(path.mode_at(100.0) == 1);
}

TEST_CASE("seed streams are decorrelated") {
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(derive_seed(42, 0) != derive_seed(43, 0));
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}
