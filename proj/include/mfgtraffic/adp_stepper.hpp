#pragma once

// Coupled integrator for the learning system
//
//   dA/dt = -theta_inv grad_A E(A, B, rho),  dB/dt = -theta_inv grad_B E(A, B, rho),
//   d_t rho = FK operator with feedback u~(dV/dy2) + w~(dV/dy2),
//
// advanced jointly by SSP-RK2; controls are rebuilt from the stage weights.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"
#include "mfgtraffic/fk_solver.hpp"
#include "mfgtraffic/hjb_residual.hpp"
#include "mfgtraffic/value_basis.hpp"

namespace mfgtraffic {

struct CoupledState {
  WeightMatrices W;
  DensityField rho;
  double t = 0.0;
};

struct CoupledTendency {
  WeightMatrices dW;  // a() holds dA/dt, b() holds dB/dt
  DensityTendency drho;
};

class AdpStepper {
 public:
  /// With learn == false the weights are frozen and only the density moves.
  AdpStepper(const GridSpec& grid, const ModelParams& p, bool learn = true)
      : grid_(grid), p_(p), basis_(grid, p), learn_(learn) {}

  const GridSpec& grid() const { return grid_; }
  const ModelParams& params() const { return p_; }
  const GridBasis& basis() const { return basis_; }
  bool learning() const { return learn_; }

  CoupledTendency rhs(const CoupledState& s) const {
    const auto r = residual_field(s.W, s.rho, grid_, p_, basis_);
    CoupledTendency out;
    if (learn_) {
      out.dW = weight_gradients(r, grid_, p_, basis_);
      out.dW *= -p_.theta_inv;
    } else {
      out.dW = WeightMatrices(p_.K);
    }
    out.drho = fk_rhs(s.rho, velocity_from_residual(r), grid_, p_);
    return out;
  }

  /// Shu-Osher form: s1 = s + dt R(s); s_next = s/2 + (s1 + dt R(s1))/2.
  CoupledState step(const CoupledState& s, double dt) const {
    const auto k1 = rhs(s);
    CoupledState s1{euler(s.W, k1.dW, dt), DensityField(grid_), s.t + dt};
    for (std::size_t c = 0; c < s.rho.size(); ++c) s1.rho[c] = s.rho[c] + dt * k1.drho[c];

    const auto k2 = rhs(s1);
    CoupledState next{WeightMatrices(p_.K), DensityField(grid_), s.t + dt};
    const auto w2 = euler(s1.W, k2.dW, dt);
    for (std::size_t k = 0; k < next.W.a_data().size(); ++k) {
      next.W.a_data()[k] = 0.5 * s.W.a_data()[k] + 0.5 * w2.a_data()[k];
      next.W.b_data()[k] = 0.5 * s.W.b_data()[k] + 0.5 * w2.b_data()[k];
    }
    for (std::size_t c = 0; c < s.rho.size(); ++c)
      next.rho[c] = 0.5 * s.rho[c] + 0.5 * (s1.rho[c] + dt * k2.drho[c]);
    if (!next.W.all_finite()) throw NumericalError("non-finite weight after step");
    return next;
  }

 private:
  static WeightMatrices euler(const WeightMatrices& W, const WeightMatrices& dW, double dt) {
    WeightMatrices out = W;
    for (std::size_t k = 0; k < out.a_data().size(); ++k) {
      out.a_data()[k] += dt * dW.a_data()[k];
      out.b_data()[k] += dt * dW.b_data()[k];
    }
    return out;
  }

  GridSpec grid_;
  ModelParams p_;
  GridBasis basis_;
  bool learn_;
};

inline CoupledTendency coupled_rhs(const CoupledState& s, const GridSpec& grid, const ModelParams& p) {
  return AdpStepper(grid, p).rhs(s);
}

inline CoupledState ssp_rk2_step(const CoupledState& s, double dt, const GridSpec& grid, const ModelParams& p) {
  return AdpStepper(grid, p).step(s, dt);
}

/// Initial weights: every entry of A and B set to weight_init.
inline CoupledState initial_state(const GridSpec& grid, const ModelParams& p) {
  return {WeightMatrices(p.K, p.weight_init), init_density(grid, p), 0.0};
}

/// Receivers for run output. Unset members are skipped.
struct OutputSinks {
  std::function<void(double t, double E, const WeightMatrices& W)> series;
  // label is the scheduled snapshot time; s.t is within dt/2 of it.
  std::function<void(double label, const CoupledState& s)> snapshot;
  std::function<void(long long step, long long total, double t, double E)> progress;
};

struct RunOptions {
  long long series_stride = 100;
  long long progress_stride = 0;  // 0 disables progress callbacks
  bool learn = true;
};

struct RunSummary {
  CoupledState final_state;
  long long steps = 0;
  double initial_E = 0.0;
  double final_E = 0.0;
  double min_mass_drift = 0.0;  // min over output strides of mass - initial mass
  double max_mass_drift = 0.0;
  double min_rho = std::numeric_limits<double>::infinity();
  double wall_seconds = 0.0;
  bool aborted = false;
  std::string error;
};

inline std::vector<double> snapshot_schedule(const RunConfig& run) {
  std::vector<double> times = run.snapshot_times;
  if (times.empty()) times = {0.0, run.T};
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

inline RunSummary run(const CoupledState& s0, const RunConfig& cfg, const GridSpec& grid, const ModelParams& p,
                      const OutputSinks& sinks, const RunOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const AdpStepper stepper(grid, p, opt.learn);
  const long long total = cfg.T <= 0.0 ? 0 : std::llround(cfg.T / cfg.dt);
  const auto times = snapshot_schedule(cfg);
  std::size_t next_snapshot = 0;
  const double mass0 = mass(s0.rho);

  RunSummary sum{s0};
  CoupledState s = s0;
  auto observe = [&](long long n, bool force_series) {
    const double t = s.t;
    const bool on_stride = opt.series_stride > 0 && n % opt.series_stride == 0;
    double E = std::numeric_limits<double>::quiet_NaN();
    auto error_now = [&] {
      if (std::isnan(E)) E = hjb_error(residual_field(s.W, s.rho, grid, p, stepper.basis()), grid);
      return E;
    };
    if (on_stride || force_series) {
      const double drift = mass(s.rho) - mass0;
      sum.min_mass_drift = std::min(sum.min_mass_drift, drift);
      sum.max_mass_drift = std::max(sum.max_mass_drift, drift);
      sum.min_rho = std::min(sum.min_rho, min_value(s.rho));
      if (sinks.series) sinks.series(t, error_now(), s.W);
    }
    while (next_snapshot < times.size() && times[next_snapshot] <= t + 0.5 * cfg.dt) {
      if (sinks.snapshot) sinks.snapshot(times[next_snapshot], s);
      ++next_snapshot;
    }
    if (sinks.progress && opt.progress_stride > 0 && n % opt.progress_stride == 0)
      sinks.progress(n, total, t, error_now());
    if (n == 0) sum.initial_E = error_now();
    if (n == total) sum.final_E = error_now();
  };

  observe(0, true);
  long long n = 0;
  try {
    for (n = 1; n <= total; ++n) {
      auto next = stepper.step(s, cfg.dt);
      next.t = s0.t + n * cfg.dt;
      s = std::move(next);
      observe(n, n == total);
    }
    n = total;
  } catch (const NumericalError& e) {
    sum.aborted = true;
    sum.error = NumericalError(e.what(), -1, n).what();
    n -= 1;
  }
  sum.steps = n;
  sum.final_state = std::move(s);
  sum.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sum;
}

}  // namespace mfgtraffic
