#pragma once

// Macroscopic observables obtained from the density by Riemann sums.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"

namespace mfgtraffic {

struct MacroProfile {
  double t = 0.0;
  std::vector<double> x;     // position cell centres
  std::vector<double> r1;    // spatial density
  std::vector<double> j;     // momentum density
  std::vector<std::optional<double>> vbulk;  // empty in vacuum cells
  std::vector<double> v;     // speed cell centres
  std::vector<double> r2;    // speed marginal
};

inline MacroProfile macro_profile(const DensityField& rho, const GridSpec& grid, const ModelParams& p, double t) {
  if (!(rho.grid() == grid)) throw std::invalid_argument("macro_profile: density/grid shape mismatch");
  MacroProfile m;
  m.t = t;
  const int nx = grid.nx(), nv = grid.nv();
  const double floor = 1e-12 / p.s_max;
  m.x.resize(nx);
  m.r1.assign(nx, 0.0);
  m.j.assign(nx, 0.0);
  m.vbulk.resize(nx);
  m.v.resize(nv);
  m.r2.assign(nv, 0.0);
  for (int jv = 0; jv < nv; ++jv) m.v[jv] = grid.v_center(jv);
  for (int i = 0; i < nx; ++i) {
    m.x[i] = grid.x_center(i);
    double r = 0.0, mom = 0.0;
    for (int jv = 0; jv < nv; ++jv) {
      r += rho(i, jv);
      mom += m.v[jv] * rho(i, jv);
      m.r2[jv] += rho(i, jv);
    }
    m.r1[i] = r * grid.dv();
    m.j[i] = mom * grid.dv();
    if (m.r1[i] >= floor) m.vbulk[i] = m.j[i] / m.r1[i];
  }
  for (auto& r : m.r2) r *= grid.dx();
  return m;
}

/// Mean speed under the speed marginal.
inline double mean_speed(const MacroProfile& m) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < m.r2.size(); ++k) {
    num += m.v[k] * m.r2[k];
    den += m.r2[k];
  }
  return num / den;
}

/// max r1 / min r1; infinite if some position is empty.
inline double spatial_contrast(const MacroProfile& m) {
  const auto [lo, hi] = std::minmax_element(m.r1.begin(), m.r1.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

/// Largest |d_t r1 + d_y1 j| over positions and interior profiles, both
/// derivatives by central differences. Profiles must be spaced exactly dt apart.
inline double continuity_check(std::span<const MacroProfile> profiles, double dt) {
  if (profiles.size() < 3) throw std::invalid_argument("continuity_check: need at least 3 profiles");
  const std::size_t nx = profiles[0].x.size();
  if (nx < 3) throw std::invalid_argument("continuity_check: need at least 3 positions");
  for (std::size_t k = 1; k < profiles.size(); ++k) {
    if (std::abs(profiles[k].t - profiles[k - 1].t - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("continuity_check: profiles are not spaced by dt");
    if (profiles[k].x.size() != nx) throw std::invalid_argument("continuity_check: profile size mismatch");
  }
  const double dx = profiles[0].x[1] - profiles[0].x[0];
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < profiles.size(); ++k) {
    const auto& prev = profiles[k - 1];
    const auto& cur = profiles[k];
    const auto& next = profiles[k + 1];
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t ip = (i + 1) % nx, im = (i + nx - 1) % nx;
      const double dt_r1 = (next.r1[i] - prev.r1[i]) / (2.0 * dt);
      const double dx_j = (cur.j[ip] - cur.j[im]) / (2.0 * dx);
      worst = std::max(worst, std::abs(dt_r1 + dx_j));
    }
  }
  return worst;
}

}  // namespace mfgtraffic
