#pragma once

// Particle cross-check of the FK solver: independent agents following the
// reflected SDE
//
//   dx = v dt,   dv = (u~ + w~)(x, v) dt + reflection + sqrt(2 eps) dW,
//
// stepped by Euler-Maruyama with mirror folding at v = 0 and v = s_max.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"
#include "mfgtraffic/fk_solver.hpp"
#include "mfgtraffic/policy.hpp"
#include "mfgtraffic/value_basis.hpp"

namespace mfgtraffic {

/// Stateless-per-draw generator keyed by (seed, agent, step). Each key yields an
/// independent stream, so agents can be stepped in any order with identical results.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::uint64_t seed, std::uint64_t agent, std::uint64_t step)
      : key_(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) ^ (agent * 0x9e3779b97f4a7c15ULL)) ^
             mix(step + 0xbb67ae8584caa73bULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

 private:
  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct AgentState {
  double x = 0.0;  // [0, L)
  double v = 0.0;  // [0, s_max]
};

struct EnsembleState {
  std::vector<AgentState> agents;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;  // number of em_step calls applied; keys the noise
};

/// Draws n agents from a cell-average density: a cell with probability equal to
/// its mass, then a uniform point inside it.
inline EnsembleState sample_initial(long long n, const DensityField& rho0, const GridSpec& grid,
                                    std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("sample_initial: agent count must be positive");
  if (!(rho0.grid() == grid)) throw std::invalid_argument("sample_initial: density/grid shape mismatch");
  std::vector<double> cdf(rho0.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < rho0.size(); ++c) {
    if (rho0[c] < 0.0) throw std::invalid_argument("sample_initial: negative density");
    acc += rho0[c];
    cdf[c] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("sample_initial: density has no mass");

  EnsembleState e;
  e.seed = seed;
  e.agents.resize(static_cast<std::size_t>(n));
  const std::uint64_t init_step = std::numeric_limits<std::uint64_t>::max();
  for (long long k = 0; k < n; ++k) {
    CounterEngine eng(seed, static_cast<std::uint64_t>(k), init_step);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double target = unif(eng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    std::size_t c = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    while (rho0[c] == 0.0 && c > 0) --c;  // target landed on a zero-width step
    const int i = static_cast<int>(c / grid.nv());
    const int j = static_cast<int>(c % grid.nv());
    e.agents[k].x = (i + unif(eng)) * grid.dx();
    e.agents[k].v = (j + unif(eng)) * grid.dv();
  }
  return e;
}

/// Mirror v back into [0, s_max]. Throws if more than two folds are needed.
inline double reflect_speed(double v, double s_max) {
  for (int fold = 0; fold < 2; ++fold) {
    if (v < 0.0) v = -v;
    else if (v > s_max) v = 2.0 * s_max - v;
    else return v;
  }
  if (v < 0.0 || v > s_max) throw std::runtime_error("reflect_speed: step too large for two folds");
  return v;
}

inline double wrap_position(double x, double L) {
  x = std::fmod(x, L);
  if (x < 0.0) x += L;
  if (x >= L) x = 0.0;
  return x;
}

/// Feedback acceleration u~ + w~ at an arbitrary point, from the closed-form series.
class FeedbackDrift {
 public:
  FeedbackDrift(const WeightMatrices& W, const ModelParams& p) : W_(W), p_(p), pb_(0.0, 0.0, p) {
    detail::check_weights(W, p);
  }

  double operator()(double x, double v) {
    pb_.assign(x, v, p_);
    double p2 = 0.0;
    for (int i = 0; i < p_.K; ++i)
      for (int j = 0; j < p_.K; ++j)
        p2 -= (W_.a(i, j) * pb_.sin_x[i] + W_.b(i, j) * pb_.cos_x[i]) * pb_.sin_v[j] * pb_.kv[j];
    return smooth_control(p2, p_) + smooth_disturbance(p2, p_);
  }

 private:
  const WeightMatrices& W_;
  const ModelParams& p_;
  PointBasis pb_;
};

inline void em_step(EnsembleState& e, const WeightMatrices& W, double dt, const ModelParams& p) {
  FeedbackDrift drift(W, p);
  const double noise = std::sqrt(2.0 * p.epsilon * dt);
  for (std::size_t k = 0; k < e.agents.size(); ++k) {
    auto& ag = e.agents[k];
    const double acc = drift(ag.x, ag.v);
    double xi = 0.0;
    if (noise > 0.0) {
      CounterEngine eng(e.seed, k, e.step);
      std::normal_distribution<double> normal(0.0, 1.0);
      xi = normal(eng);
    }
    const double x_new = wrap_position(ag.x + ag.v * dt, p.road_length);
    ag.v = reflect_speed(ag.v + acc * dt + noise * xi, p.s_max);
    ag.x = x_new;
  }
  e.t += dt;
  ++e.step;
}

/// Normalized cell-count histogram.
inline DensityField empirical_density(const EnsembleState& e, const GridSpec& grid) {
  if (e.agents.empty()) throw std::invalid_argument("empirical_density: empty ensemble");
  DensityField rho(grid);
  const double w = 1.0 / (static_cast<double>(e.agents.size()) * grid.cell_area());
  for (const auto& ag : e.agents) {
    const int i = std::clamp(static_cast<int>(ag.x / grid.dx()), 0, grid.nx() - 1);
    const int j = std::clamp(static_cast<int>(ag.v / grid.dv()), 0, grid.nv() - 1);
    rho(i, j) += w;
  }
  return rho;
}

struct McComparison {
  long long agents = 0;
  long long steps = 0;
  double l1 = 0.0;             // on the FV grid
  double max_deviation = 0.0;  // largest cellwise |rho_fv - rho_mc| on the FV grid
  int bin_x = 1, bin_v = 1;    // FV cells per histogram bin
  double l1_binned = 0.0;      // on the histogram grid
  DensityField fv;
  DensityField mc;
};

/// Evolves the FV density and a particle ensemble side by side under frozen
/// weights and compares the two, both per FV cell and on histogram bins of
/// bin_x x bin_v cells.
inline McComparison mc_compare(const WeightMatrices& W, const DensityField& rho0, const GridSpec& grid,
                               const ModelParams& p, long long agents, long long steps, double dt,
                               std::uint64_t seed, int bin_x = 1, int bin_v = 1) {
  const auto vel = velocity_field(W, grid, p);
  DensityField fv = rho0;
  for (long long n = 0; n < steps; ++n) fv = fk_ssp_rk2_step(fv, vel, dt, grid, p);
  auto ens = sample_initial(agents, rho0, grid, seed);
  for (long long n = 0; n < steps; ++n) em_step(ens, W, dt, p);
  auto mc = empirical_density(ens, grid);
  const double binned = l1_distance(coarsen(fv, bin_x, bin_v), coarsen(mc, bin_x, bin_v));
  return {agents, steps, l1_distance(fv, mc), max_abs_difference(fv, mc), bin_x, bin_v, binned, fv, mc};
}

}  // namespace mfgtraffic
