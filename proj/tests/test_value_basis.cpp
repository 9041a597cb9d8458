#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mfgtraffic/value_basis.hpp"

using namespace mfgtraffic;

namespace {

WeightMatrices random_weights(std::mt19937_64& rng, int K, double scale = 0.5) {
  std::uniform_real_distribution<double> d(-scale, scale);
  WeightMatrices W(K);
  for (auto& v : W.a_data()) v = d(rng);
  for (auto& v : W.b_data()) v = d(rng);
  return W;
}

// |a - b| relative to |b|, with a floor so accidental zeros do not dominate.
double rel_err(double a, double b, double floor) { return std::abs(a - b) / std::max(std::abs(b), floor); }

}  // namespace

TEST(ValueBasis, ZeroWeightsGiveZero) {
  const ModelParams p;
  const WeightMatrices W(p.K);
  for (double y1 : {0.0, 1.0, 5.0})
    for (double y2 : {0.0, 0.1, p.s_max}) {
      EXPECT_EQ(eval_value(W, y1, y2, p), 0.0);
      EXPECT_EQ(eval_dv_dy2(W, y1, y2, p), 0.0);
      EXPECT_EQ(eval_d2v_dy2(W, y1, y2, p), 0.0);
      const auto [g1, g2] = eval_grad_y(W, y1, y2, p);
      EXPECT_EQ(g1, 0.0);
      EXPECT_EQ(g2, 0.0);
    }
}

TEST(ValueBasis, SingleSineMode) {
  const ModelParams p;
  WeightMatrices W(p.K);
  W.a(1, 0) = 1.0;
  for (double y2 : {0.0, 0.05, p.s_max}) EXPECT_NEAR(eval_value(W, p.road_length / 4, y2, p), 1.0, 1e-15);
}

TEST(ValueBasis, CosineExtremumHasZeroSlope) {
  const ModelParams p;
  WeightMatrices W(p.K);
  W.b(1, 0) = 1.0;
  EXPECT_EQ(eval_grad_y(W, 0.0, 0.1, p).first, 0.0);
}

TEST(ValueBasis, PeriodicInPosition) {
  const ModelParams p;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(0.0, p.road_length), v(0.0, p.s_max);
  for (int k = 0; k < 100; ++k) {
    const auto W = random_weights(rng, p.K);
    const double y1 = x(rng), y2 = v(rng);
    EXPECT_NEAR(eval_value(W, y1, y2, p), eval_value(W, y1 + p.road_length, y2, p), 1e-12);
    EXPECT_NEAR(eval_value(W, y1, y2, p), eval_value(W, y1 - 3.0 * p.road_length, y2, p), 1e-12);
    EXPECT_NEAR(eval_grad_y(W, y1, y2, p).first, eval_grad_y(W, y1 + p.road_length, y2, p).first, 1e-11);
  }
}

TEST(ValueBasis, NeumannAtSpeedBoundaries) {
  ModelParams p;
  p.K = 5;
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const auto W = random_weights(rng, p.K);
    const double y1 = 0.1 * k;
    EXPECT_EQ(eval_dv_dy2(W, y1, 0.0, p), 0.0);
    EXPECT_EQ(eval_dv_dy2(W, y1, p.s_max, p), 0.0);
  }
}

TEST(ValueBasis, LinearInWeights) {
  const ModelParams p;
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto W1 = random_weights(rng, p.K), W2 = random_weights(rng, p.K);
    const double y1 = 0.3 * k, y2 = 0.01 * k;
    EXPECT_NEAR(eval_value(W1 + W2, y1, y2, p), eval_value(W1, y1, y2, p) + eval_value(W2, y1, y2, p), 1e-14);
  }
}

TEST(ValueBasis, DerivativesMatchFiniteDifferences) {
  ModelParams p;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(0.0, p.road_length), v(0.05 * p.s_max, 0.95 * p.s_max);
  for (int K : {2, 3}) {
    p.K = K;
    for (int k = 0; k < 50; ++k) {
      const auto W = random_weights(rng, p.K);
      const double y1 = x(rng), y2 = v(rng);
      const double h = 1e-6, h2 = 1e-4;
      const double fd_v = (eval_value(W, y1, y2 + h, p) - eval_value(W, y1, y2 - h, p)) / (2 * h);
      const double fd_x = (eval_value(W, y1 + h, y2, p) - eval_value(W, y1 - h, y2, p)) / (2 * h);
      const double fd_vv = (eval_value(W, y1, y2 + h2, p) - 2 * eval_value(W, y1, y2, p) +
                            eval_value(W, y1, y2 - h2, p)) / (h2 * h2);
      EXPECT_LT(rel_err(eval_dv_dy2(W, y1, y2, p), fd_v, 1e-3), 1e-5);
      EXPECT_LT(rel_err(eval_d2v_dy2(W, y1, y2, p), fd_vv, 1e-1), 1e-4);
      const auto [g1, g2] = eval_grad_y(W, y1, y2, p);
      EXPECT_LT(rel_err(g1, fd_x, 1e-3), 1e-5);
      EXPECT_EQ(g2, eval_dv_dy2(W, y1, y2, p));
    }
  }
}

TEST(ValueBasis, SecondDerivativeEdgeCases) {
  const ModelParams p;
  WeightMatrices W(p.K);
  W.a(1, 0) = 0.7;
  W.b(0, 0) = -0.3;
  W.b(1, 0) = 0.2;
  EXPECT_EQ(eval_d2v_dy2(W, 1.3, 0.07, p), 0.0);
}

TEST(BasisPartials, DegenerateSineModeVanishes) {
  const ModelParams p;
  for (int j = 0; j < p.K; ++j) {
    const auto ps = basis_partials({0, j}, Branch::sine, 1.1, 0.05, p);
    EXPECT_EQ(ps.value, 0.0);
    EXPECT_EQ(ps.dv_dy2, 0.0);
    EXPECT_EQ(ps.grad_y1, 0.0);
    EXPECT_EQ(ps.grad_y2, 0.0);
    EXPECT_EQ(ps.d2v_dy2, 0.0);
  }
}

TEST(BasisPartials, SpatialModeAtQuarterRoad) {
  const ModelParams p;
  const auto ps = basis_partials({1, 0}, Branch::sine, p.road_length / 4, 0.123, p);
  EXPECT_NEAR(ps.value, 1.0, 1e-15);
  EXPECT_EQ(ps.dv_dy2, 0.0);
}

TEST(BasisPartials, MatchWeightFiniteDifferences) {
  ModelParams p;
  p.K = 3;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(0.0, p.road_length), v(0.0, p.s_max);
  for (int k = 0; k < 20; ++k) {
    const auto W = random_weights(rng, p.K);
    const double y1 = x(rng), y2 = v(rng);
    for (Branch br : {Branch::sine, Branch::cosine})
      for (int i = 0; i < p.K; ++i)
        for (int j = 0; j < p.K; ++j) {
          const double h = 1e-6;
          auto plus = W, minus = W;
          (br == Branch::sine ? plus.a(i, j) : plus.b(i, j)) += h;
          (br == Branch::sine ? minus.a(i, j) : minus.b(i, j)) -= h;
          auto fd = [&](auto f) { return (f(plus) - f(minus)) / (2 * h); };
          const auto ps = basis_partials({i, j}, br, y1, y2, p);
          const double fv = fd([&](const WeightMatrices& w) { return eval_value(w, y1, y2, p); });
          const double fdv = fd([&](const WeightMatrices& w) { return eval_dv_dy2(w, y1, y2, p); });
          const double fg1 = fd([&](const WeightMatrices& w) { return eval_grad_y(w, y1, y2, p).first; });
          const double fdd = fd([&](const WeightMatrices& w) { return eval_d2v_dy2(w, y1, y2, p); });
          // The map is linear in the weights, so the floor only guards exact zeros.
          EXPECT_LT(rel_err(ps.value, fv, 1e-6), 1e-6);
          EXPECT_LT(rel_err(ps.dv_dy2, fdv, 1e-5), 1e-6);
          EXPECT_LT(rel_err(ps.grad_y1, fg1, 1e-5), 1e-6);
          EXPECT_LT(rel_err(ps.d2v_dy2, fdd, 1e-3), 1e-6);
        }
  }
}

TEST(BasisPartials, SixNonzeroFunctionsAtKTwo) {
  const ModelParams p;
  int nonzero = 0;
  for (Branch br : {Branch::sine, Branch::cosine})
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        bool any = false;
        for (int s = 0; s < 37 && !any; ++s)
          any = std::abs(basis_partials({i, j}, br, 0.17 * s, 0.0083 * s, p).value) > 1e-12;
        nonzero += any;
      }
  EXPECT_EQ(nonzero, 6);
}

TEST(BasisPartials, RejectsOutOfRangeIndex) {
  const ModelParams p;
  EXPECT_THROW(basis_partials({2, 0}, Branch::sine, 0.0, 0.0, p), std::out_of_range);
  EXPECT_THROW(eval_value(WeightMatrices(3), 0.0, 0.0, p), std::invalid_argument);
}
