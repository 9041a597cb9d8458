#pragma once

// First-order finite-volume discretization of the forward Kolmogorov equation
//
//   d_t rho = eps d2_y2 rho - d_y1 (y2 rho) - d_y2 ((u + w) rho)
//
// on T x [0, s_max]: Rusanov fluxes for both transport directions, a central
// difference for the speed diffusion, periodic faces in y1 and zero total flux
// through the y2 = 0 and y2 = s_max faces.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"
#include "mfgtraffic/hjb_residual.hpp"
#include "mfgtraffic/policy.hpp"
#include "mfgtraffic/value_basis.hpp"

namespace mfgtraffic {

/// y2-direction transport speed u~ + w~ at every cell centre.
struct VelocityField {
  std::vector<double> a;
};

using DensityTendency = std::vector<double>;

/// Smooth bump initial density: exp(10 cos(2 pi (y1 - L/2) / L)) in position times a
/// compactly supported mollifier of half-width 1/11 centred at 0.3 s_max in speed,
/// normalized to unit discrete mass.
inline DensityField init_density(const GridSpec& grid, const ModelParams& p) {
  DensityField rho(grid);
  const double centre = 0.3 * p.s_max;
  const double half_width = 1.0 / 11.0;
  for (int i = 0; i < grid.nx(); ++i) {
    const double x = grid.x_center(i);
    const double fx = std::exp(10.0 * std::cos(2.0 * std::numbers::pi * (x - 0.5 * p.road_length) / p.road_length));
    for (int j = 0; j < grid.nv(); ++j) {
      const double d = grid.v_center(j) - centre;
      if (std::abs(d) >= half_width) continue;
      const double z = 11.0 * d;
      rho(i, j) = fx * std::exp(1.0 / (z * z - 1.0));
    }
  }
  const double m = mass(rho);
  if (!(m > 0.0))
    throw std::invalid_argument("init_density: grid too coarse, no cell centre inside the initial speed bump");
  for (auto& v : rho.values()) v /= m;
  return rho;
}

/// F = (fL + fR)/2 - s (qR - qL)/2
inline double rusanov_flux(double qL, double qR, double speed_bound, double fL, double fR) {
  if (speed_bound < 0.0) throw std::invalid_argument("rusanov_flux: negative speed bound");
  return 0.5 * (fL + fR) - 0.5 * speed_bound * (qR - qL);
}

inline VelocityField velocity_from_residual(const ResidualField& r) {
  VelocityField vel;
  vel.a.resize(r.control.size());
  for (std::size_t k = 0; k < vel.a.size(); ++k) vel.a[k] = r.control[k] + r.disturbance[k];
  return vel;
}

/// Feedback transport speed u~(dV/dy2) + w~(dV/dy2) sampled at cell centres.
inline VelocityField velocity_field(const WeightMatrices& W, const GridSpec& grid, const ModelParams& p) {
  detail::check_weights(W, p);
  const GridBasis gb(grid, p);
  VelocityField vel;
  vel.a.resize(grid.cells());
  for (int i = 0; i < grid.nx(); ++i)
    for (int j = 0; j < grid.nv(); ++j) {
      const double p2 = detail::cell_series(W, gb, i, j).d2;
      vel.a[grid.index(i, j)] = smooth_control(p2, p) + smooth_disturbance(p2, p);
    }
  return vel;
}

inline DensityTendency fk_rhs(const DensityField& rho, const VelocityField& vel, const GridSpec& grid,
                              const ModelParams& p) {
  if (!(rho.grid() == grid) || vel.a.size() != grid.cells())
    throw std::invalid_argument("fk_rhs: field/grid shape mismatch");
  const int nx = grid.nx(), nv = grid.nv();
  const double inv_dx = 1.0 / grid.dx();
  const double inv_dv = 1.0 / grid.dv();
  const double diff = p.epsilon * inv_dv;
  DensityTendency out(grid.cells(), 0.0);

  // Position transport: speed is the row coordinate y2 = v_j, exact and positive.
  for (int j = 0; j < nv; ++j) {
    const double v = grid.v_center(j);
    const double s = std::abs(v);
    for (int i = 0; i < nx; ++i) {
      const int ip = (i + 1 == nx) ? 0 : i + 1;
      const double qL = rho(i, j), qR = rho(ip, j);
      const double F = rusanov_flux(qL, qR, s, v * qL, v * qR) * inv_dx;
      out[grid.index(i, j)] -= F;
      out[grid.index(ip, j)] += F;
    }
  }

  // Speed transport and diffusion through interior faces only; the two
  // boundary faces carry no flux.
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j + 1 < nv; ++j) {
      const std::size_t cl = grid.index(i, j), cr = grid.index(i, j + 1);
      const double aL = vel.a[cl], aR = vel.a[cr];
      const double a_face = 0.5 * (aL + aR);
      const double s = std::max(std::abs(aL), std::abs(aR));
      const double qL = rho[cl], qR = rho[cr];
      const double F = (rusanov_flux(qL, qR, s, a_face * qL, a_face * qR) - diff * (qR - qL)) * inv_dv;
      out[cl] -= F;
      out[cr] += F;
    }
  }
  check_finite(out, "density tendency");
  return out;
}

/// One Shu-Osher SSP-RK2 step of the FK equation with a static velocity field.
inline DensityField fk_ssp_rk2_step(const DensityField& rho, const VelocityField& vel, double dt,
                                    const GridSpec& grid, const ModelParams& p) {
  const auto k1 = fk_rhs(rho, vel, grid, p);
  DensityField stage(grid);
  for (std::size_t c = 0; c < rho.size(); ++c) stage[c] = rho[c] + dt * k1[c];
  const auto k2 = fk_rhs(stage, vel, grid, p);
  DensityField next(grid);
  for (std::size_t c = 0; c < rho.size(); ++c) next[c] = 0.5 * rho[c] + 0.5 * (stage[c] + dt * k2[c]);
  return next;
}

}  // namespace mfgtraffic
