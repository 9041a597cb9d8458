#pragma once

// Central finite-difference check of the closed-form weight gradients of E.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"
#include "mfgtraffic/hjb_residual.hpp"
#include "mfgtraffic/value_basis.hpp"

namespace mfgtraffic {

struct GradientCheckEntry {
  Branch branch;
  BasisIndex idx;
  double analytic = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;
  double abs_error = 0.0;
  bool degenerate = false;  // sine mode with i = 0, identically zero
  bool pass = false;
};

struct GradientCheckResult {
  std::vector<GradientCheckEntry> entries;
  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
  }
  double worst_rel_error() const {
    double w = 0.0;
    for (const auto& e : entries) if (!e.degenerate) w = std::max(w, e.rel_error);
    return w;
  }
};

struct GradientCheckTolerance {
  double step = 1e-6;
  double rel = 1e-4;
  double degenerate_abs = 1e-10;
};

inline GradientCheckResult check_gradients(const WeightMatrices& W, const DensityField& rho, const GridSpec& grid,
                                           const ModelParams& p, const GradientCheckTolerance& tol = {}) {
  const auto g = weight_gradients(W, rho, grid, p);
  GradientCheckResult res;
  for (Branch br : {Branch::sine, Branch::cosine}) {
    for (int i = 0; i < p.K; ++i) {
      for (int j = 0; j < p.K; ++j) {
        WeightMatrices plus = W, minus = W;
        double& wp = br == Branch::sine ? plus.a(i, j) : plus.b(i, j);
        double& wm = br == Branch::sine ? minus.a(i, j) : minus.b(i, j);
        wp += tol.step;
        wm -= tol.step;
        GradientCheckEntry e{br, {i, j}};
        e.analytic = br == Branch::sine ? g.a(i, j) : g.b(i, j);
        e.finite_difference = (hjb_error(plus, rho, grid, p) - hjb_error(minus, rho, grid, p)) / (2.0 * tol.step);
        e.abs_error = std::abs(e.analytic - e.finite_difference);
        e.degenerate = br == Branch::sine && i == 0;
        if (e.degenerate) {
          e.rel_error = 0.0;
          e.pass = std::abs(e.analytic) <= tol.degenerate_abs && std::abs(e.finite_difference) <= tol.degenerate_abs;
        } else {
          e.rel_error = e.abs_error / std::abs(e.finite_difference);
          e.pass = e.rel_error <= tol.rel;
        }
        res.entries.push_back(e);
      }
    }
  }
  return res;
}

/// Random weights in [-scale, scale] and a random positive density of unit mass.
inline std::pair<WeightMatrices, DensityField> random_state(std::mt19937_64& rng, const GridSpec& grid,
                                                            const ModelParams& p, double scale = 0.3) {
  std::uniform_real_distribution<double> w(-scale, scale);
  std::uniform_real_distribution<double> r(0.1, 1.0);
  WeightMatrices W(p.K);
  for (auto& v : W.a_data()) v = w(rng);
  for (auto& v : W.b_data()) v = w(rng);
  DensityField rho(grid);
  for (auto& v : rho.values()) v = r(rng);
  const double m = mass(rho);
  for (auto& v : rho.values()) v /= m;
  return {W, rho};
}

}  // namespace mfgtraffic
