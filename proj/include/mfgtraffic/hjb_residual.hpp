#pragma once

// HJB-Isaacs residual of the approximate value function,
//
//   f = alpha V + H(y, u~(V_y2), w~(V_y2), Phi[rho], grad V) + epsilon V_y2y2,
//
// its squared L2(Y) norm E and the closed-form weight gradients of E. All
// integrals are midpoint sums over cell centres.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"
#include "mfgtraffic/policy.hpp"
#include "mfgtraffic/value_basis.hpp"

namespace mfgtraffic {

/// Trigonometric factors of every harmonic at every cell centre, one table per axis.
class GridBasis {
 public:
  GridBasis(const GridSpec& grid, const ModelParams& p) : K_(p.K), nx_(grid.nx()), nv_(grid.nv()) {
    sin_x_.resize(static_cast<std::size_t>(nx_) * K_);
    cos_x_.resize(sin_x_.size());
    sin_v_.resize(static_cast<std::size_t>(nv_) * K_);
    cos_v_.resize(sin_v_.size());
    for (int i = 0; i < nx_; ++i) {
      const PointBasis pb(grid.x_center(i), 0.0, p);
      for (int k = 0; k < K_; ++k) {
        sin_x_[i * K_ + k] = pb.sin_x[k];
        cos_x_[i * K_ + k] = pb.cos_x[k];
      }
      if (i == 0) { kx_ = pb.kx; kv_ = pb.kv; }
    }
    for (int j = 0; j < nv_; ++j) {
      const PointBasis pb(0.0, grid.v_center(j), p);
      for (int k = 0; k < K_; ++k) {
        sin_v_[j * K_ + k] = pb.sin_v[k];
        cos_v_[j * K_ + k] = pb.cos_v[k];
      }
    }
  }

  int K() const { return K_; }
  const double* sin_x(int i) const { return &sin_x_[static_cast<std::size_t>(i) * K_]; }
  const double* cos_x(int i) const { return &cos_x_[static_cast<std::size_t>(i) * K_]; }
  const double* sin_v(int j) const { return &sin_v_[static_cast<std::size_t>(j) * K_]; }
  const double* cos_v(int j) const { return &cos_v_[static_cast<std::size_t>(j) * K_]; }
  const std::vector<double>& kx() const { return kx_; }
  const std::vector<double>& kv() const { return kv_; }

 private:
  int K_, nx_, nv_;
  std::vector<double> sin_x_, cos_x_, sin_v_, cos_v_, kx_, kv_;
};

/// Per-cell quantities shared by E, its gradient and the transport velocity.
struct ResidualField {
  std::vector<double> f;        // residual
  std::vector<double> dv_dy2;   // p2 = dV/dy2
  std::vector<double> dv_dy1;   // p1 = dV/dy1
  std::vector<double> control;  // u~(p2)
  std::vector<double> disturbance;  // w~(p2)
  InteractionField phi;
};

/// Same layout as the weights: a(i, j) holds dE/da_ij and b(i, j) holds dE/db_ij.
using WeightGradient = WeightMatrices;

namespace detail {

/// Evaluates the series for V, dV/dy1, dV/dy2 and d2V/dy2 at cell (i, j) from the tables.
struct CellSeries {
  double value = 0.0, d1 = 0.0, d2 = 0.0, dd2 = 0.0;
};

inline CellSeries cell_series(const WeightMatrices& W, const GridBasis& gb, int i, int j) {
  const int K = gb.K();
  const double* sx = gb.sin_x(i);
  const double* cx = gb.cos_x(i);
  const double* sv = gb.sin_v(j);
  const double* cv = gb.cos_v(j);
  const auto& kx = gb.kx();
  const auto& kv = gb.kv();
  CellSeries s;
  for (int a = 0; a < K; ++a) {
    double row_c = 0.0, row_s = 0.0, row_cc = 0.0, row_d1 = 0.0;
    for (int b = 0; b < K; ++b) {
      const double amp = W.a(a, b) * sx[a] + W.b(a, b) * cx[a];
      const double damp = (W.a(a, b) * cx[a] - W.b(a, b) * sx[a]) * kx[a];
      row_c += amp * cv[b];
      row_s += amp * sv[b] * kv[b];
      row_cc += amp * cv[b] * kv[b] * kv[b];
      row_d1 += damp * cv[b];
    }
    s.value += row_c;
    s.d2 -= row_s;
    s.dd2 -= row_cc;
    s.d1 += row_d1;
  }
  return s;
}

}  // namespace detail

inline ResidualField residual_field(const WeightMatrices& W, const DensityField& rho,
                                    const GridSpec& grid, const ModelParams& p,
                                    const GridBasis& gb) {
  detail::check_weights(W, p);
  if (!(rho.grid() == grid)) throw std::invalid_argument("residual_field: density/grid shape mismatch");
  if (!W.all_finite()) throw NumericalError("non-finite weight");
  check_finite(rho.values(), "density");

  ResidualField r;
  r.phi = interaction_field(rho, grid, p);
  const std::size_t n = grid.cells();
  r.f.resize(n);
  r.dv_dy2.resize(n);
  r.dv_dy1.resize(n);
  r.control.resize(n);
  r.disturbance.resize(n);
  const double inv_beta = 1.0 / p.beta;
  for (int i = 0; i < grid.nx(); ++i) {
    const double phi = r.phi.values[i];
    for (int j = 0; j < grid.nv(); ++j) {
      const std::size_t c = grid.index(i, j);
      const double y2 = grid.v_center(j);
      const auto s = detail::cell_series(W, gb, i, j);
      const double u = smooth_control(s.d2, p);
      const double w = smooth_disturbance(s.d2, p);
      const double ham = 0.5 * u * u - w * w / (2.0 * p.gamma * p.gamma) + (phi - inv_beta) * y2 +
                         s.d1 * y2 + s.d2 * (u + w);
      r.f[c] = p.alpha * s.value + ham + p.epsilon * s.dd2;
      r.dv_dy2[c] = s.d2;
      r.dv_dy1[c] = s.d1;
      r.control[c] = u;
      r.disturbance[c] = w;
    }
  }
  check_finite(r.f, "HJB residual");
  return r;
}

inline ResidualField residual_field(const WeightMatrices& W, const DensityField& rho,
                                    const GridSpec& grid, const ModelParams& p) {
  return residual_field(W, rho, grid, p, GridBasis(grid, p));
}

inline double hjb_error(const ResidualField& r, const GridSpec& grid) {
  double s = 0.0;
  for (double v : r.f) s += v * v;
  return s * grid.cell_area();
}

inline double hjb_error(const WeightMatrices& W, const DensityField& rho, const GridSpec& grid,
                        const ModelParams& p) {
  return hjb_error(residual_field(W, rho, grid, p), grid);
}

/// grad_A E = 2 int f d_A f, with d_{a_ij} f expanded by the chain rule through
/// V, grad V, d2V/dy2 and the tanh sub-solutions. The cosine branch swaps the y1 factor.
inline WeightGradient weight_gradients(const ResidualField& r, const GridSpec& grid,
                                       const ModelParams& p, const GridBasis& gb) {
  const int K = p.K;
  WeightGradient g(K);
  const auto& kx = gb.kx();
  const auto& kv = gb.kv();
  const double g2 = p.gamma * p.gamma;
  std::vector<double> q(K), rr(K);
  for (int i = 0; i < grid.nx(); ++i) {
    const double* sx = gb.sin_x(i);
    const double* cx = gb.cos_x(i);
    for (int j = 0; j < grid.nv(); ++j) {
      const std::size_t c = grid.index(i, j);
      const double f = r.f[c];
      if (f == 0.0) continue;
      const double y2 = grid.v_center(j);
      const double p2 = r.dv_dy2[c];
      const double u = r.control[c];
      const double w = r.disturbance[c];
      const auto [du, dw] = smooth_derivatives(p2, p);
      const double dH_du = u + p2;
      const double dH_dw = -w / g2 + p2;
      // Coefficient multiplying d(dV/dy2)/d weight: control/disturbance chain
      // terms plus the second costate component of grad_p H = (y2, u + w).
      const double c2 = dH_du * du + dH_dw * dw + (u + w);
      const double* sv = gb.sin_v(j);
      const double* cv = gb.cos_v(j);
      for (int b = 0; b < K; ++b) {
        // alpha*dV + c2*d(V_y2) + eps*d(V_y2y2) without the y1 factor, and y2*d(V_y1) likewise.
        q[b] = p.alpha * cv[b] - c2 * sv[b] * kv[b] - p.epsilon * cv[b] * kv[b] * kv[b];
        rr[b] = y2 * cv[b];
      }
      for (int a = 0; a < K; ++a) {
        for (int b = 0; b < K; ++b) {
          g.a(a, b) += f * (sx[a] * q[b] + cx[a] * kx[a] * rr[b]);
          g.b(a, b) += f * (cx[a] * q[b] - sx[a] * kx[a] * rr[b]);
        }
      }
    }
  }
  g *= 2.0 * grid.cell_area();
  return g;
}

inline WeightGradient weight_gradients(const WeightMatrices& W, const DensityField& rho,
                                       const GridSpec& grid, const ModelParams& p) {
  const GridBasis gb(grid, p);
  return weight_gradients(residual_field(W, rho, grid, p, gb), grid, p, gb);
}

}  // namespace mfgtraffic
