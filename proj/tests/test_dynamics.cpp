#include <cmath>
#include <vector>

#include "doctest.h"
#include "ssctm/dynamics.hpp"
#include "ssctm/errors.hpp"
#include "testutil.hpp"

using namespace ssctm;

TEST_CASE("sending and receiving follow the triangular diagram") {
  FreewayModel m = testutil::two_cell_model();
  CHECK(sending(m, 0, 50.0, 0) == doctest::Approx(3000.0));   // v-limited
  CHECK(sending(m, 0, 150.0, 0) == doctest::Approx(6000.0));  // capacity-limited
  CHECK(sending(m, 1, 150.0, 0) == doctest::Approx(3000.0));  // reduced mode
  CHECK(receiving(m, 50.0) == doctest::Approx(7000.0));
  CHECK(receiving(m, 400.0) == doctest::Approx(0.0));
}

TEST_CASE("free-flow boundary flows") {
  FreewayModel m = testutil::two_cell_model();
  std::vector<double> r = {4320.0, 2400.0};
  std::vector<double> f = boundary_flows(m, 0, {50.0, 50.0}, r);
  // beta_1 S_1 = 0.75 * 3000 = 2250 passes: downstream space is
  // 20*(400-50) - 2400 = 4600.
  CHECK(f[0] == doctest::Approx(2250.0));
  CHECK(f[1] == doctest::Approx(3000.0));

  std::vector<double> g = vector_field(m, 0, {50.0, 50.0}, r);
  CHECK(g[0] == doctest::Approx(4320.0 - 2250.0 / 0.75));
  CHECK(g[1] == doctest::Approx(2250.0 + 2400.0 - 3000.0));
}

TEST_CASE("spillback blocks the upstream boundary") {
  FreewayModel m = testutil::two_cell_model();
  std::vector<double> r = {4320.0, 2400.0};
  // Receiving flow of cell 2 is 20*(400-390) = 200 < r_2: the on-ramp uses
  // all of it, so no mainline flow enters.
  std::vector<double> f = boundary_flows(m, 0, {200.0, 390.0}, r);
  CHECK(f[0] == doctest::Approx(0.0));
  CHECK(f[1] == doctest::Approx(6000.0));
}

TEST_CASE("off-ramp flows follow the mainline ratio") {
  FreewayModel m = testutil::two_cell_model();
  FlowVector fv = flows(m, 0, {50.0, 50.0}, {4320.0, 2400.0});
  CHECK(fv.f[0] == doctest::Approx(2250.0));
  CHECK(fv.s[0] == doctest::Approx((1.0 / 0.75 - 1.0) * 2250.0));
  CHECK(fv.s[1] == doctest::Approx(0.0));  // beta_2 = 1: no off-ramp
}

TEST_CASE("vector field points inward at the lower box corner") {
  // At n = (72, 77.5) in the best mode the field must not point below the
  // corner in either coordinate.
  FreewayModel m = testutil::two_cell_model();
  std::vector<double> g = vector_field(m, 0, {72.0, 77.5}, {4320.0, 2400.0});
  CHECK(g[0] >= 0.0);
  CHECK(g[1] >= 0.0);
  CHECK(g[0] == doctest::Approx(0.0));    // exactly balanced at the corner
  CHECK(g[1] == doctest::Approx(990.0));
}

TEST_CASE("clamping projects onto the domain") {
  FreewayModel m = testutil::two_cell_model();
  std::vector<double> n = {-3.0, 405.0};
  clamp_state(m, n);
  CHECK(n[0] == 0.0);
  CHECK(n[1] == 400.0);
  n = {1e9, -0.5};
  clamp_state(m, n);
  CHECK(n[0] == 1e9);  // the buffer is unbounded above
  CHECK(n[1] == 0.0);
}

TEST_CASE("fixed-mode integration converges to the free-flow equilibrium") {
  FreewayModel m = testutil::two_cell_model();
  std::vector<double> r = {1200.0, 600.0};
  // G = 0 at n1 = r1 / v = 20 and n2 = (beta_1 r_1 + r_2) / v = 25.
  std::vector<double> end =
      integrate_fixed_mode(m, 0, {0.0, 0.0}, r, 2.0, StepConfig{});
  CHECK(end[0] == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(end[1] == doctest::Approx(25.0).epsilon(1e-9));
}

TEST_CASE("fourth-order steps beat explicit Euler") {
  FreewayModel m = testutil::two_cell_model();
  std::vector<double> r = {4000.0, 1000.0};
  std::vector<double> n0 = {10.0, 350.0};  // transient with active spillback

  StepConfig fine;
  fine.dt = 1e-6;
  std::vector<double> ref = integrate_fixed_mode(m, 0, n0, r, 0.02, fine);

  StepConfig coarse;
  coarse.dt = 2e-3;
  std::vector<double> rk4 = integrate_fixed_mode(m, 0, n0, r, 0.02, coarse);
  coarse.method = StepMethod::kEuler;
  std::vector<double> euler = integrate_fixed_mode(m, 0, n0, r, 0.02, coarse);

  auto err = [&](const std::vector<double>& x) {
    return std::hypot(x[0] - ref[0], x[1] - ref[1]);
  };
  CHECK(err(rk4) < err(euler));
  CHECK(err(rk4) < 1e-4);
}

TEST_CASE("a step that genuinely leaves the domain raises an error") {
  FreewayModel m = testutil::two_cell_model();
  // Absurd on-ramp demand: cell 2 gains ~44 veh in one millisecond-hour
  // step while already at jam density.
  std::vector<double> n = {0.0, 399.9};
  StepConfig cfg;
  CHECK_THROWS_AS(advance(m, 0, {0.0, 50000.0}, cfg.dt, cfg, n),
                  StepTooLargeError);
}

TEST_CASE("tiny overshoots are projected back, not fatal") {
  FreewayModel m = testutil::two_cell_model();
  std::vector<double> n = {0.0, 5e-7};
  StepConfig cfg;
  cfg.method = StepMethod::kEuler;
  // One Euler step drains the cell past zero by ~1e-7 veh: within tolerance.
  advance(m, 0, {0.0, 0.0}, 2e-2, cfg, n);
  CHECK(n[1] == 0.0);
}

TEST_CASE("flow bounds hold at random states") {
  SplitMix64 rng(31337u);
  for (int trial = 0; trial < 100; ++trial) {
    FreewayModel m = testutil::random_model(rng);
    std::vector<double> r = testutil::random_inflow(rng, m);
    const int K = m.cell_count();
    std::vector<double> n(K);
    n[0] = rng.next_range(0.0, 3.0 * m.critical_density(0));
    for (int k = 1; k < K; ++k) n[k] = rng.next_range(0.0, m.cell.n_max);
    for (int i = 0; i < m.mode_count(); ++i) {
      std::vector<double> f = boundary_flows(m, i, n, r);
      for (int k = 0; k < K; ++k) {
        CHECK(f[k] >= 0.0);
        CHECK(f[k] <= m.beta[k] * m.modes[i][k] + 1e-9);
        if (k + 1 < K)  // never exceeds the downstream mainline budget
          CHECK(f[k] <= std::max(receiving(m, n[k + 1]) - r[k + 1], 0.0) + 1e-9);
      }
    }
  }
}
