#pragma once

// Top of the spectrum of an Ulam matrix (or any square real matrix): the k
// eigenvalues of largest modulus and a nonnegative leading eigenvector.
//
// Up to SpectrumOptions::dense_limit rows (default 1024) the full eigenvalue
// set comes from a dense Hessenberg-QR solve; above it, block power iteration
// with Rayleigh-Ritz extraction (the deflation happens in the
// orthogonalisation).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "huplab/errors.hpp"
#include "huplab/grid.hpp"
#include "huplab/ulam.hpp"

namespace huplab {

enum class SpectrumMethod { dense, power_iteration };

inline const char* to_string(SpectrumMethod m) {
  return m == SpectrumMethod::dense ? "dense" : "power-iteration";
}

struct SpectrumOptions {
  std::size_t dense_limit = 1024;
  std::size_t max_iterations = 100000;
  double tolerance = 1e-12;  // on the Rayleigh residual, relative to max(1, |lambda|)
  std::uint64_t seed = 0x5eed;
};

struct SpectrumReport {
  std::vector<cplx> eigenvalues;  // modulus descending
  Eigen::VectorXd leading_vector; // >= 0, sums to 1
  double spectral_radius = 0.0;
  SpectrumMethod method = SpectrumMethod::dense;
  std::size_t iterations = 0;
  double residual = 0.0;          // Rayleigh residual of the leading pair
};

namespace detail {

inline void sort_by_modulus(std::vector<cplx>& v) {
  std::stable_sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

inline Eigen::VectorXd normalise_nonnegative(const Eigen::VectorXd& v) {
  Eigen::VectorXd w = v;
  if (w.sum() < 0.0) w = -w;
  w = w.cwiseMax(0.0);
  const double s = w.sum();
  if (s > 0.0) w /= s;
  return w;
}

// Inverse iteration for the eigenvector of a real eigenvalue lambda.
inline Eigen::VectorXd inverse_iteration(const Eigen::MatrixXd& a, double lambda, double& residual) {
  const Eigen::Index n = a.rows();
  const double shift = lambda + 1e-10 * std::max(1.0, std::abs(lambda));
  Eigen::MatrixXd b = a;
  b.diagonal().array() -= shift;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < 8; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    const double norm = w.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    v = w / norm;
  }
  const double rq = v.dot(a * v);
  residual = (a * v - rq * v).norm();
  return v;
}

}  // namespace detail

inline SpectrumReport spectral_top_dense(const Eigen::MatrixXd& a, std::size_t k) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("spectral_top: dense eigensolver failed", {}, INFINITY);
  std::vector<cplx> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  detail::sort_by_modulus(ev);
  SpectrumReport r;
  r.method = SpectrumMethod::dense;
  r.spectral_radius = std::abs(ev.front());
  double residual = 0.0;
  r.leading_vector = detail::normalise_nonnegative(detail::inverse_iteration(a, ev.front().real(), residual));
  r.residual = residual;
  ev.resize(std::min(k, ev.size()));
  r.eigenvalues = std::move(ev);
  return r;
}

// Block power iteration on a sparse matrix with Rayleigh-Ritz extraction.
inline SpectrumReport spectral_top_iterative(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a,
                                             std::size_t k, const SpectrumOptions& opt = {}) {
  const Eigen::Index n = a.rows();
  const Eigen::Index block = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::max<std::size_t>(2 * k, k + 4)));
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd q(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = unif(rng);
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, block);

  const auto kk = static_cast<Eigen::Index>(std::min<std::size_t>(k, static_cast<std::size_t>(block)));
  std::vector<cplx> ritz;
  Eigen::VectorXcd lead;
  double worst = INFINITY;
  std::size_t it = 0;
  for (; it < opt.max_iterations; ++it) {
    Eigen::MatrixXd z = a * q;
    const Eigen::MatrixXd h = q.transpose() * z;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(h.cast<cplx>());
    std::vector<Eigen::Index> order(static_cast<std::size_t>(block));
    for (Eigen::Index i = 0; i < block; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return std::abs(ces.eigenvalues()[x]) > std::abs(ces.eigenvalues()[y]);
    });
    ritz.clear();
    worst = 0.0;
    for (Eigen::Index i = 0; i < kk; ++i) {
      const Eigen::Index c = order[static_cast<std::size_t>(i)];
      const cplx lambda = ces.eigenvalues()[c];
      const Eigen::VectorXcd y = ces.eigenvectors().col(c);
      const Eigen::VectorXcd v = q.cast<cplx>() * y;
      const Eigen::VectorXcd av = z.cast<cplx>() * y;
      const double res = (av - lambda * v).norm() / v.norm();
      worst = std::max(worst, res / std::max(1.0, std::abs(lambda)));
      ritz.push_back(lambda);
      if (i == 0) lead = v;
    }
    if (worst <= opt.tolerance) break;
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() * Eigen::MatrixXd::Identity(n, block);
  }
  if (it == opt.max_iterations) {
    throw ConvergenceError("spectral_top: power iteration hit the iteration cap",
                           ritz.empty() ? cplx{} : ritz.front(), worst);
  }
  detail::sort_by_modulus(ritz);
  SpectrumReport r;
  r.method = SpectrumMethod::power_iteration;
  r.eigenvalues = ritz;
  r.spectral_radius = std::abs(ritz.front());
  r.iterations = it + 1;
  r.residual = worst;
  Eigen::VectorXd re = lead.real();
  if (re.norm() < lead.imag().norm()) re = lead.imag();
  r.leading_vector = detail::normalise_nonnegative(re);
  return r;
}

inline SpectrumReport spectral_top(const UlamMatrix& m, std::size_t k, const SpectrumOptions& opt = {}) {
  if (k < 1) throw ParameterError("spectral_top: k must be >= 1");
  if (m.n_bins <= opt.dense_limit) return spectral_top_dense(m.dense(), k);
  return spectral_top_iterative(m.entries, k, opt);
}

// Share of a bin-mass vector carried by |x| > (1 - fraction) p, counting the
// bin that straddles the cut proportionally.
inline double edge_mass_fraction(const Eigen::VectorXd& masses, const BinGrid& grid, double fraction = 0.05) {
  const double cut = (1.0 - fraction) * grid.p();
  double edge = 0.0, total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = masses[static_cast<Eigen::Index>(k)];
    total += v;
    const double a = grid.lower(k), b = grid.upper(k);
    const double outside = std::max(0.0, std::min(b, -cut) - a) + std::max(0.0, b - std::max(a, cut));
    edge += v * std::min(1.0, outside / grid.width());
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace huplab
