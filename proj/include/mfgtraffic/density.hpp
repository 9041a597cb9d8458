#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfgtraffic/config.hpp"

namespace mfgtraffic {

/// Raised when a NaN or infinity shows up in a field. Carries the flat cell
/// index (or -1 when not cell-specific) and the step index when known.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long long cell = -1, long long step = -1)
      : std::runtime_error(compose(what, cell, step)), cell_(cell), step_(step) {}
  long long cell() const { return cell_; }
  long long step() const { return step_; }

 private:
  static std::string compose(const std::string& what, long long cell, long long step) {
    std::ostringstream os;
    os << what;
    if (cell >= 0) os << " (cell " << cell << ")";
    if (step >= 0) os << " (step " << step << ")";
    return os.str();
  }
  long long cell_, step_;
};

/// Cell averages on a GridSpec, stored in GridSpec::index order.
class DensityField {
 public:
  explicit DensityField(const GridSpec& grid, double fill = 0.0)
      : grid_(grid), values_(grid.cells(), fill) {}

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const DensityField& o) const { return grid_ == o.grid_ && values_ == o.values_; }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

inline double mass(const DensityField& rho) {
  double s = 0.0;
  for (double v : rho.values()) s += v;
  return s * rho.grid().cell_area();
}

inline double min_value(const DensityField& rho) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : rho.values()) m = std::min(m, v);
  return m;
}

/// L1(Y) distance between two densities on the same grid.
inline double l1_distance(const DensityField& a, const DensityField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("l1_distance: grid mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s * a.grid().cell_area();
}

inline double max_abs_difference(const DensityField& a, const DensityField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("max_abs_difference: grid mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

/// Block-averages bx x bv groups of cells into one; mass is preserved.
inline DensityField coarsen(const DensityField& rho, int bx, int bv) {
  const auto& g = rho.grid();
  if (bx < 1 || bv < 1 || g.nx() % bx != 0 || g.nv() % bv != 0)
    throw std::invalid_argument("coarsen: block size must divide the grid");
  DensityField out(GridSpec(g.nx() / bx, g.nv() / bv, g.road_length(), g.s_max()));
  const double w = 1.0 / (static_cast<double>(bx) * bv);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.nv(); ++j) out(i / bx, j / bv) += w * rho(i, j);
  return out;
}

inline void check_finite(const std::vector<double>& v, const char* what, long long step = -1) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!std::isfinite(v[k])) throw NumericalError(std::string("non-finite value in ") + what,
                                                   static_cast<long long>(k), step);
}

}  // namespace mfgtraffic
