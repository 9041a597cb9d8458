#pragma once

// Running cost, pre-Hamiltonian, the exact saturated optimizers of the
// pre-Hamiltonian and the smooth tanh sub-solutions used by the learner.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"

namespace mfgtraffic {

struct Costate {
  double p1 = 0.0;
  double p2 = 0.0;
};

/// Phi[rho](x_i) = int_Y sin(2 pi (x_i - eta1) / L) rho(eta) d eta, one value per x cell.
struct InteractionField {
  std::vector<double> values;
  double t = 0.0;
};

/// Exact minimizer over u in [-u_max, u_max]; u-part of H is u^2/2 + p2 u.
inline double ramp_control(double p2, const ModelParams& p) {
  if (p2 < -p.u_max) return p.u_max;
  if (p2 > p.u_max) return -p.u_max;
  return -p2;
}

/// Exact maximizer over w in [-w_max, w_max]; w-part of H is -w^2/(2 gamma^2) + p2 w.
inline double ramp_disturbance(double p2, const ModelParams& p) {
  const double s = p.gamma * p.gamma * p2;
  if (s < -p.w_max) return -p.w_max;
  if (s > p.w_max) return p.w_max;
  return s;
}

inline double smooth_control(double p2, const ModelParams& p) { return -p.u_max * std::tanh(p2); }

inline double smooth_disturbance(double p2, const ModelParams& p) {
  return p.w_max * std::tanh(p.gamma * p.gamma * p2);
}

inline double sech2(double x) {
  if (std::abs(x) > 350.0) return 0.0;
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

/// (d u~/d p2, d w~/d p2)
inline std::pair<double, double> smooth_derivatives(double p2, const ModelParams& p) {
  const double g2 = p.gamma * p.gamma;
  return {-p.u_max * sech2(p2), g2 * p.w_max * sech2(g2 * p2)};
}

inline InteractionField interaction_field(const DensityField& rho, const GridSpec& grid,
                                          const ModelParams& p, double t = 0.0) {
  if (!(rho.grid() == grid)) throw std::invalid_argument("interaction_field: density/grid shape mismatch");
  const double two_pi_over_L = 2.0 * std::numbers::pi / p.road_length;
  double C = 0.0, S = 0.0;
  for (int i = 0; i < grid.nx(); ++i) {
    double col = 0.0;
    for (int j = 0; j < grid.nv(); ++j) col += rho(i, j);
    const double eta = grid.x_center(i) * two_pi_over_L;
    C += std::cos(eta) * col;
    S += std::sin(eta) * col;
  }
  C *= grid.cell_area();
  S *= grid.cell_area();

  InteractionField phi;
  phi.t = t;
  phi.values.resize(grid.nx());
  for (int i = 0; i < grid.nx(); ++i) {
    const double x = grid.x_center(i) * two_pi_over_L;
    phi.values[i] = std::sin(x) * C - std::cos(x) * S;
  }
  return phi;
}

/// Lambda = u^2/2 - w^2/(2 gamma^2) + (Phi - 1/beta) y2
inline double running_cost(double y2, double u, double w, double phi_at_y1, const ModelParams& p) {
  return 0.5 * u * u - w * w / (2.0 * p.gamma * p.gamma) + (phi_at_y1 - 1.0 / p.beta) * y2;
}

/// H = Lambda + p . (y2, u + w)
inline double pre_hamiltonian(double y2, double u, double w, double phi_at_y1, Costate c,
                              const ModelParams& p) {
  return running_cost(y2, u, w, phi_at_y1, p) + c.p1 * y2 + c.p2 * (u + w);
}

}  // namespace mfgtraffic
