#pragma once

// Approximate value function as a truncated Fourier series on T x [0, s_max]:
//
//   V(y) = sum_{i,j < K} (a_ij sin(2 pi i y1 / L) + b_ij cos(2 pi i y1 / L)) cos(2 pi j y2 / s_max)
//
// Every basis function is L-periodic in y1 and has zero y2-derivative at
// y2 = 0 and y2 = s_max.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mfgtraffic/config.hpp"

namespace mfgtraffic {

/// K x K coefficient matrices, row index = spatial harmonic i, column = speed harmonic j.
class WeightMatrices {
 public:
  WeightMatrices() = default;
  explicit WeightMatrices(int K, double fill = 0.0)
      : K_(K), a_(static_cast<std::size_t>(K) * K, fill), b_(static_cast<std::size_t>(K) * K, fill) {
    if (K < 1) throw std::invalid_argument("WeightMatrices: K must be >= 1");
  }

  int K() const { return K_; }
  double& a(int i, int j) { return a_[idx(i, j)]; }
  double& b(int i, int j) { return b_[idx(i, j)]; }
  double a(int i, int j) const { return a_[idx(i, j)]; }
  double b(int i, int j) const { return b_[idx(i, j)]; }
  std::vector<double>& a_data() { return a_; }
  std::vector<double>& b_data() { return b_; }
  const std::vector<double>& a_data() const { return a_; }
  const std::vector<double>& b_data() const { return b_; }

  bool all_finite() const {
    for (double v : a_) if (!std::isfinite(v)) return false;
    for (double v : b_) if (!std::isfinite(v)) return false;
    return true;
  }

  WeightMatrices& operator+=(const WeightMatrices& o) {
    check_shape(o);
    for (std::size_t k = 0; k < a_.size(); ++k) { a_[k] += o.a_[k]; b_[k] += o.b_[k]; }
    return *this;
  }
  WeightMatrices& operator*=(double s) {
    for (auto& v : a_) v *= s;
    for (auto& v : b_) v *= s;
    return *this;
  }
  friend WeightMatrices operator+(WeightMatrices l, const WeightMatrices& r) { return l += r; }
  friend WeightMatrices operator*(double s, WeightMatrices w) { return w *= s; }

  bool operator==(const WeightMatrices&) const = default;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * K_ + j; }
  void check_shape(const WeightMatrices& o) const {
    if (o.K_ != K_) throw std::invalid_argument("WeightMatrices: shape mismatch");
  }

  int K_ = 0;
  std::vector<double> a_, b_;
};

struct BasisIndex {
  int i = 0;  // spatial harmonic
  int j = 0;  // speed harmonic
};

enum class Branch { sine, cosine };

/// Trigonometric factors of every harmonic at one point. Arguments are reduced
/// to a fraction of a period first, so y1 and y1 + L give identical factors and
/// sin(2 pi j) at y2 = s_max is exactly zero.
struct PointBasis {
  std::vector<double> sin_x, cos_x, sin_v, cos_v;
  std::vector<double> kx, kv;  // 2 pi i / L and 2 pi j / s_max

  PointBasis(double y1, double y2, const ModelParams& p) { assign(y1, y2, p); }

  void assign(double y1, double y2, const ModelParams& p) {
    const int K = p.K;
    sin_x.resize(K); cos_x.resize(K); sin_v.resize(K); cos_v.resize(K);
    kx.resize(K); kv.resize(K);
    double r = std::fmod(y1, p.road_length);
    if (r < 0.0) r += p.road_length;
    const double tx = r / p.road_length;
    const double tv = y2 / p.s_max;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int k = 0; k < K; ++k) {
      const double px = two_pi * std::fmod(k * tx, 1.0);
      const double pv = two_pi * std::fmod(k * tv, 1.0);
      sin_x[k] = std::sin(px);
      cos_x[k] = std::cos(px);
      sin_v[k] = std::sin(pv);
      cos_v[k] = std::cos(pv);
      kx[k] = two_pi * k / p.road_length;
      kv[k] = two_pi * k / p.s_max;
    }
  }
};

namespace detail {
inline void check_weights(const WeightMatrices& W, const ModelParams& p) {
  if (W.K() != p.K) throw std::invalid_argument("weight matrices do not match K");
}
}  // namespace detail

inline double eval_value(const WeightMatrices& W, double y1, double y2, const ModelParams& p) {
  detail::check_weights(W, p);
  const PointBasis pb(y1, y2, p);
  double sum = 0.0;
  for (int i = 0; i < p.K; ++i)
    for (int j = 0; j < p.K; ++j)
      sum += (W.a(i, j) * pb.sin_x[i] + W.b(i, j) * pb.cos_x[i]) * pb.cos_v[j];
  return sum;
}

inline double eval_dv_dy2(const WeightMatrices& W, double y1, double y2, const ModelParams& p) {
  detail::check_weights(W, p);
  const PointBasis pb(y1, y2, p);
  double sum = 0.0;
  for (int i = 0; i < p.K; ++i)
    for (int j = 0; j < p.K; ++j)
      sum -= (W.a(i, j) * pb.sin_x[i] + W.b(i, j) * pb.cos_x[i]) * pb.sin_v[j] * pb.kv[j];
  return sum;
}

inline double eval_d2v_dy2(const WeightMatrices& W, double y1, double y2, const ModelParams& p) {
  detail::check_weights(W, p);
  const PointBasis pb(y1, y2, p);
  double sum = 0.0;
  for (int i = 0; i < p.K; ++i)
    for (int j = 0; j < p.K; ++j)
      sum -= (W.a(i, j) * pb.sin_x[i] + W.b(i, j) * pb.cos_x[i]) * pb.cos_v[j] * pb.kv[j] * pb.kv[j];
  return sum;
}

/// (dV/dy1, dV/dy2)
inline std::pair<double, double> eval_grad_y(const WeightMatrices& W, double y1, double y2,
                                             const ModelParams& p) {
  detail::check_weights(W, p);
  const PointBasis pb(y1, y2, p);
  double g1 = 0.0, g2 = 0.0;
  for (int i = 0; i < p.K; ++i)
    for (int j = 0; j < p.K; ++j) {
      g1 += (W.a(i, j) * pb.cos_x[i] - W.b(i, j) * pb.sin_x[i]) * pb.kx[i] * pb.cos_v[j];
      g2 -= (W.a(i, j) * pb.sin_x[i] + W.b(i, j) * pb.cos_x[i]) * pb.sin_v[j] * pb.kv[j];
    }
  return {g1, g2};
}

/// Derivatives of V, dV/dy2, grad_y V and d2V/dy2 with respect to one weight.
struct PartialSet {
  double value = 0.0;
  double dv_dy2 = 0.0;
  double grad_y1 = 0.0;
  double grad_y2 = 0.0;  // equal to dv_dy2
  double d2v_dy2 = 0.0;
};

inline PartialSet basis_partials(const PointBasis& pb, BasisIndex idx, Branch branch) {
  const int i = idx.i, j = idx.j;
  // y1 factor and its y1-derivative for the chosen branch.
  const double fx = branch == Branch::sine ? pb.sin_x[i] : pb.cos_x[i];
  const double dfx = branch == Branch::sine ? pb.cos_x[i] * pb.kx[i] : -pb.sin_x[i] * pb.kx[i];
  PartialSet ps;
  ps.value = fx * pb.cos_v[j];
  ps.dv_dy2 = -fx * pb.sin_v[j] * pb.kv[j];
  ps.grad_y1 = dfx * pb.cos_v[j];
  ps.grad_y2 = ps.dv_dy2;
  ps.d2v_dy2 = -fx * pb.cos_v[j] * pb.kv[j] * pb.kv[j];
  return ps;
}

inline PartialSet basis_partials(BasisIndex idx, Branch branch, double y1, double y2,
                                 const ModelParams& p) {
  if (idx.i < 0 || idx.j < 0 || idx.i >= p.K || idx.j >= p.K)
    throw std::out_of_range("basis_partials: index outside [0, K)");
  return basis_partials(PointBasis(y1, y2, p), idx, branch);
}

}  // namespace mfgtraffic
