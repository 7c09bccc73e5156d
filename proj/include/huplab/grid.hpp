#pragma once

// Piecewise-constant representations on the circle (-p, p]: equal-width
// half-open bins (a_k, a_{k+1}], sampled test functions and L^1 densities.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "huplab/errors.hpp"
#include "huplab/gaussmap.hpp"

namespace huplab {

using cplx = std::complex<double>;

class BinGrid {
 public:
  BinGrid(int p, std::size_t n_bins) : p_(static_cast<double>(p)), n_(n_bins) {
    if (p < 1) throw ParameterError("BinGrid: p must be positive");
    if (n_bins < 1) throw ParameterError("BinGrid: need at least one bin");
    width_ = 2.0 * p_ / static_cast<double>(n_);
  }

  std::size_t size() const noexcept { return n_; }
  double p() const noexcept { return p_; }
  double width() const noexcept { return width_; }

  // k-th edge, k = 0..n; edge(0) = -p and edge(n) = p exactly.
  double edge(std::size_t k) const noexcept {
    if (k == n_) return p_;
    return 2.0 * p_ * static_cast<double>(k) / static_cast<double>(n_) - p_;
  }
  double lower(std::size_t k) const noexcept { return edge(k); }
  double upper(std::size_t k) const noexcept { return edge(k + 1); }
  double center(std::size_t k) const noexcept { return 0.5 * (edge(k) + edge(k + 1)); }

  bool contains(double x) const noexcept { return x > -p_ && x <= p_; }

  // Bin k with edge(k) < x <= edge(k+1). x must lie in (-p, p].
  std::size_t index_of(double x) const noexcept {
    double k = std::ceil((x + p_) / width_) - 1.0;
    k = std::clamp(k, 0.0, static_cast<double>(n_ - 1));
    auto i = static_cast<std::size_t>(k);
    while (i > 0 && x <= edge(i)) --i;
    while (i + 1 < n_ && x > edge(i + 1)) ++i;
    return i;
  }

 private:
  double p_;
  std::size_t n_;
  double width_;
};

// Bin midpoints, nudged off branch endpoints of U_beta (and off 0) so that
// pointwise operator evaluation is unambiguous.
inline std::vector<double> safe_sample_points(const BinGrid& grid, const MapParams& params) {
  std::vector<double> pts;
  pts.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double x = grid.center(k);
    double shift = 1e-7 * grid.width();
    while (near_branch_endpoint(x, params, 1e-9)) {
      x = grid.center(k) + shift;
      shift *= 1.618;
    }
    pts.push_back(x);
  }
  return pts;
}

// Test function on (-p, p], constant on each bin, zero-extended outside.
class GridFunction {
 public:
  GridFunction(const MapParams& params, std::size_t n_bins)
      : params_(params), grid_(params.p(), n_bins), values_(n_bins, cplx{}) {}

  GridFunction(const MapParams& params, std::vector<cplx> values)
      : params_(params), grid_(params.p(), values.size()), values_(std::move(values)) {}

  template <class F>
  static GridFunction sampled(const MapParams& params, std::size_t n_bins, F&& f) {
    GridFunction g(params, n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) g.values_[k] = cplx(f(g.grid_.center(k)));
    return g;
  }

  const MapParams& params() const noexcept { return params_; }
  const BinGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::vector<cplx>& values() noexcept { return values_; }
  const std::vector<cplx>& values() const noexcept { return values_; }

  cplx operator()(double x) const noexcept {
    if (!grid_.contains(x)) return {};
    return values_[grid_.index_of(x)];
  }

  double sup_norm() const noexcept {
    double s = 0.0;
    for (const auto& v : values_) s = std::max(s, std::abs(v));
    return s;
  }

  std::vector<double> sample_points() const { return safe_sample_points(grid_, params_); }

 private:
  MapParams params_;
  BinGrid grid_;
  std::vector<cplx> values_;
};

// Finite complex measure on (-p, p]: piecewise-constant density with respect
// to length plus a separate point mass at 0.
class GridDensity {
 public:
  GridDensity(const MapParams& params, std::size_t n_bins)
      : params_(params), grid_(params.p(), n_bins), values_(n_bins, cplx{}) {}

  GridDensity(const MapParams& params, std::vector<cplx> values, cplx atom0 = {})
      : params_(params), grid_(params.p(), values.size()), values_(std::move(values)),
        atom0_(atom0) {}

  const MapParams& params() const noexcept { return params_; }
  const BinGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::vector<cplx>& values() noexcept { return values_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  cplx atom0() const noexcept { return atom0_; }
  void set_atom0(cplx a) noexcept { atom0_ = a; }

  cplx operator()(double x) const noexcept {
    if (!grid_.contains(x)) return {};
    return values_[grid_.index_of(x)];
  }

  double sup_norm() const noexcept {
    double s = 0.0;
    for (const auto& v : values_) s = std::max(s, std::abs(v));
    return s;
  }

  double l1_norm() const noexcept {
    double s = 0.0;
    for (const auto& v : values_) s += std::abs(v);
    return s * grid_.width();
  }

  double total_variation() const noexcept { return l1_norm() + std::abs(atom0_); }

  // Per-bin masses (density times bin width), the vector an Ulam matrix acts on.
  std::vector<cplx> bin_masses() const {
    std::vector<cplx> m(values_);
    for (auto& v : m) v *= grid_.width();
    return m;
  }

 private:
  MapParams params_;
  BinGrid grid_;
  std::vector<cplx> values_;
  cplx atom0_{};
};

}  // namespace huplab
