#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfgtraffic/policy.hpp"
#include "oracles.hpp"

using namespace mfgtraffic;

TEST(Ramp, ControlBranches) {
  const ModelParams p;
  EXPECT_EQ(ramp_control(0.0, p), 0.0);
  EXPECT_EQ(ramp_control(2.0 * p.u_max, p), -p.u_max);
  EXPECT_EQ(ramp_control(-2.0 * p.u_max, p), p.u_max);
  EXPECT_DOUBLE_EQ(ramp_control(0.5 * p.u_max, p), -0.5 * p.u_max);
}

TEST(Ramp, DisturbanceBranches) {
  const ModelParams p;
  const double g2 = p.gamma * p.gamma;
  EXPECT_EQ(ramp_disturbance(0.0, p), 0.0);
  EXPECT_DOUBLE_EQ(ramp_disturbance(p.w_max / (2.0 * g2), p), 0.5 * p.w_max);
  EXPECT_EQ(ramp_disturbance(p.w_max, p), p.w_max);
  EXPECT_EQ(ramp_disturbance(-p.w_max, p), -p.w_max);
}

TEST(Smooth, Values) {
  const ModelParams p;
  EXPECT_EQ(smooth_control(0.0, p), 0.0);
  EXPECT_EQ(smooth_disturbance(0.0, p), 0.0);
  EXPECT_NEAR(p.u_max, 0.05236, 5e-6);
  EXPECT_NEAR(smooth_control(1.0, p), -0.03988, 5e-6);
  for (double p2 : {-1e3, 1e3}) {
    EXPECT_LE(std::abs(smooth_control(p2, p)), p.u_max);
    EXPECT_LE(std::abs(smooth_disturbance(p2, p)), p.w_max);
  }
  // Strictly inside the box while tanh is not yet rounded to 1.
  EXPECT_LT(std::abs(smooth_control(10.0, p)), p.u_max);
  EXPECT_LT(std::abs(smooth_disturbance(0.1, p)), p.w_max);
}

TEST(Smooth, Derivatives) {
  const ModelParams p;
  const auto [du0, dw0] = smooth_derivatives(0.0, p);
  EXPECT_DOUBLE_EQ(du0, -p.u_max);
  EXPECT_DOUBLE_EQ(dw0, p.gamma * p.gamma * p.w_max);
  for (double p2 : {-50.0, 50.0}) {
    const auto [du, dw] = smooth_derivatives(p2, p);
    EXPECT_LE(std::abs(du), 1e-20);
    EXPECT_LE(std::abs(dw), 1e-20);
  }
  EXPECT_EQ(sech2(1e4), 0.0);
}

TEST(Smooth, DerivativesMatchFiniteDifferences) {
  const ModelParams p;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2.0, 2.0), dsmall(-0.02, 0.02);
  for (int k = 0; k < 200; ++k) {
    // Separate ranges so both tanh profiles are sampled where they bend.
    const double p2 = k % 2 ? d(rng) : dsmall(rng);
    // Steps sized to each tanh argument, 1e-4 in the scaled variable.
    const double hu = 1e-4, hw = 1e-4 / (p.gamma * p.gamma);
    const auto [du, dw] = smooth_derivatives(p2, p);
    const double fdu = (smooth_control(p2 + hu, p) - smooth_control(p2 - hu, p)) / (2 * hu);
    const double fdw = (smooth_disturbance(p2 + hw, p) - smooth_disturbance(p2 - hw, p)) / (2 * hw);
    EXPECT_LE(std::abs(du - fdu), 1e-6 * std::abs(fdu)) << p2;
    // Deep in the saturated tail the difference quotient is pure round-off.
    if (std::abs(fdw) > 1e-6 * p.gamma * p.gamma * p.w_max) EXPECT_LE(std::abs(dw - fdw), 1e-6 * std::abs(fdw)) << p2;
    else EXPECT_LE(std::abs(dw), 1e-5 * p.gamma * p.gamma * p.w_max);
  }
}

TEST(Smooth, BoundsAndMonotonicity) {
  const ModelParams p;
  double prev_u = INFINITY, prev_w = -INFINITY, prev_us = INFINITY, prev_ws = -INFINITY;
  for (int k = -2000; k <= 2000; ++k) {
    const double p2 = k * 1e-3;
    const double u = ramp_control(p2, p), w = ramp_disturbance(p2, p);
    const double us = smooth_control(p2, p), ws = smooth_disturbance(p2, p);
    EXPECT_LE(std::abs(u), p.u_max);
    EXPECT_LE(std::abs(us), p.u_max);
    EXPECT_LE(std::abs(w), p.w_max);
    EXPECT_LE(std::abs(ws), p.w_max);
    EXPECT_LE(u, prev_u);
    EXPECT_LE(us, prev_us);
    EXPECT_GE(w, prev_w);
    EXPECT_GE(ws, prev_ws);
    prev_u = u, prev_w = w, prev_us = us, prev_ws = ws;
  }
}

TEST(Interaction, UniformDensityGivesZero) {
  const ModelParams p;
  const GridSpec grid(32, 8, p.road_length, p.s_max);
  const auto phi = interaction_field(oracles::uniform_density(grid), grid, p, 1.5);
  EXPECT_EQ(phi.t, 1.5);
  ASSERT_EQ(phi.values.size(), 32u);
  for (double v : phi.values) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Interaction, SingleCellActsLikeDirac) {
  const ModelParams p;
  const GridSpec grid(16, 16, p.road_length, p.s_max);
  DensityField rho(grid);
  rho(3, 5) = 0.8 / grid.cell_area();
  const auto phi = interaction_field(rho, grid, p);
  // x_7 - eta_3 = 4 dx = L/4.
  EXPECT_NEAR(phi.values[7], 0.8, 1e-14);
  EXPECT_NEAR(phi.values[3], 0.0, 1e-14);
}

TEST(Interaction, SeparableFormMatchesDoubleSum) {
  const ModelParams p;
  const GridSpec grid(16, 16, p.road_length, p.s_max);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    auto [W, rho] = random_state(rng, grid, p);
    const auto phi = interaction_field(rho, grid, p);
    for (int i = 0; i < grid.nx(); ++i) {
      double direct = 0.0;
      for (int k = 0; k < grid.nx(); ++k)
        for (int j = 0; j < grid.nv(); ++j)
          direct += std::sin(2.0 * std::numbers::pi * (grid.x_center(i) - grid.x_center(k)) / p.road_length) *
                    rho(k, j) * grid.cell_area();
      EXPECT_NEAR(phi.values[i], direct, 1e-12);
      EXPECT_LE(std::abs(phi.values[i]), 1.0);
    }
  }
}

TEST(Interaction, LinearInDensity) {
  const ModelParams p;
  const GridSpec grid(16, 8, p.road_length, p.s_max);
  std::mt19937_64 rng(13);
  auto [W1, r1] = random_state(rng, grid, p);
  auto [W2, r2] = random_state(rng, grid, p);
  DensityField sum(grid);
  for (std::size_t c = 0; c < sum.size(); ++c) sum[c] = 2.0 * r1[c] + r2[c];
  const auto a = interaction_field(r1, grid, p), b = interaction_field(r2, grid, p), s = interaction_field(sum, grid, p);
  for (int i = 0; i < grid.nx(); ++i) EXPECT_NEAR(s.values[i], 2.0 * a.values[i] + b.values[i], 1e-14);
}

TEST(Interaction, RejectsShapeMismatch) {
  const ModelParams p;
  const GridSpec g1(16, 8, p.road_length, p.s_max), g2(8, 8, p.road_length, p.s_max);
  EXPECT_THROW(interaction_field(DensityField(g1), g2, p), std::invalid_argument);
}

TEST(RunningCost, Examples) {
  const ModelParams p;
  EXPECT_EQ(running_cost(0.2, 0.0, 0.0, 1.0 / p.beta, p), 0.0);
  EXPECT_NEAR(running_cost(p.s_max, p.u_max, 0.0, 0.0, p), -0.15571, 5e-6);
  EXPECT_DOUBLE_EQ(running_cost(p.s_max, p.u_max, 0.0, 0.0, p), 0.5 * p.u_max * p.u_max - p.s_max / p.beta);
  double prev = running_cost(0.1, 0.0, 0.0, 0.3, p);
  for (double w = 0.001; w <= p.w_max; w += 0.001) {
    const double c = running_cost(0.1, 0.0, w, 0.3, p);
    EXPECT_LT(c, prev);
    EXPECT_EQ(c, running_cost(0.1, 0.0, -w, 0.3, p));
    prev = c;
  }
}

TEST(PreHamiltonian, Examples) {
  const ModelParams p;
  EXPECT_EQ(pre_hamiltonian(0.1, 0.02, 0.003, 0.4, {}, p), running_cost(0.1, 0.02, 0.003, 0.4, p));
  EXPECT_DOUBLE_EQ(pre_hamiltonian(p.s_max, 0.0, 0.0, 1.0 / p.beta, {1.0, 0.0}, p), p.s_max);
}

TEST(PreHamiltonian, RampPairIsSaddle) {
  const auto r = oracles::saddle_check(200, 401, 14);
  EXPECT_EQ(r.points, 200);
  EXPECT_TRUE(r.pass()) << r.worst_violation << " " << r.worst_u_cells << " " << r.worst_w_cells;
}

TEST(PreHamiltonian, SmoothPairIsFeasibleButSuboptimal) {
  const ModelParams p;
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> d(-0.2, 0.2);
  for (int k = 0; k < 500; ++k) {
    const Costate c{d(rng), d(rng)};
    const double ramp = pre_hamiltonian(0.1, ramp_control(c.p2, p), ramp_disturbance(c.p2, p), 0.2, c, p);
    // Against the exact inner maximizer, a smooth control never beats the ramp control.
    const double smooth = pre_hamiltonian(0.1, smooth_control(c.p2, p), ramp_disturbance(c.p2, p), 0.2, c, p);
    EXPECT_LE(ramp, smooth + 1e-16);
  }
}
