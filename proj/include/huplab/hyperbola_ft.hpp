#pragma once

// Measures on the hyperbola Gamma = { (t, 1/t) : t != 0 } and their Fourier
// transforms in the pi convention,
//
//   mu^(xi1, xi2) = int e^{i pi (xi1 t + xi2 / t)} g(t) dt,
//
// evaluated anywhere in the plane and on lattice crosses
//
//   Lambda = { (n + q/p, 0) : |n| <= N }  u  { (0, beta m) : |m| <= N }.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "huplab/detail/format.hpp"
#include "huplab/errors.hpp"
#include "huplab/parallel.hpp"
#include "huplab/quadrature.hpp"

namespace huplab {

// g(t) = f(t) sqrt(1 + 1/t^4): arc-length density f turned into a density in t.
template <class F>
auto arc_density_to_g(F&& f, double t) {
  if (t == 0.0 || !std::isfinite(t)) throw DomainError("arc_density_to_g: t must be finite and nonzero");
  return f(t) * std::hypot(1.0, 1.0 / (t * t));
}

struct HyperbolaAtom {
  double t;        // the atom sits at (t, 1/t)
  cplx weight;
};

// What the quadrature needs to know about a density beyond its values.
struct DensityEnvelope {
  double window = 8.0;                       // |t| in [1, window] is integrated directly
  std::function<double(double)> outer_tail;  // bound on int_{|t| > T} |g| as a function of T
  double inner_sup = 1.0;                    // bound on |g(t)| for 0 < |t| <= 1
};

class HyperbolaMeasure {
 public:
  enum class Kind { density, atoms };

  static HyperbolaMeasure from_density(std::function<cplx(double)> g, DensityEnvelope envelope) {
    if (!(envelope.window >= 1.0)) throw ParameterError("HyperbolaMeasure: window must be >= 1");
    if (!envelope.outer_tail) throw ParameterError("HyperbolaMeasure: density needs an outer tail bound");
    HyperbolaMeasure m;
    m.kind_ = Kind::density;
    m.density_ = std::move(g);
    m.envelope_ = std::move(envelope);
    return m;
  }

  static HyperbolaMeasure from_atoms(std::vector<HyperbolaAtom> atoms) {
    for (const auto& a : atoms)
      if (a.t == 0.0 || !std::isfinite(a.t)) throw DomainError("HyperbolaMeasure: atom at t = 0");
    HyperbolaMeasure m;
    m.kind_ = Kind::atoms;
    m.atoms_ = std::move(atoms);
    return m;
  }

  static HyperbolaMeasure zero() { return from_atoms({}); }

  // g(t) = e^{-t^2}
  static HyperbolaMeasure gaussian() {
    DensityEnvelope env;
    env.window = 7.0;
    env.outer_tail = [](double T) { return std::sqrt(std::numbers::pi) * std::erfc(T); };
    env.inner_sup = 1.0;
    return from_density([](double t) { return cplx(std::exp(-t * t)); }, env);
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<HyperbolaAtom>& atoms() const noexcept { return atoms_; }
  const DensityEnvelope& envelope() const noexcept { return envelope_; }
  cplx density(double t) const { return density_(t); }

 private:
  HyperbolaMeasure() = default;
  Kind kind_ = Kind::atoms;
  std::function<cplx(double)> density_;
  DensityEnvelope envelope_;
  std::vector<HyperbolaAtom> atoms_;
};

struct FtValue {
  cplx value;
  double error = 0.0;  // quadrature error estimate plus declared tail bounds
};

namespace detail {

// int_S^inf a(s) e^{i omega s} ds by two integrations by parts, given
// e = e^{i omega S}; a' by central differences.
template <class A>
cplx oscillatory_tail(A& a, double omega, double s, cplx e) {
  const double h = 1e-4 * s;
  const cplx da = (a(s + h) - a(s - h)) / (2.0 * h);
  const cplx iw(0.0, omega);
  return -a(s) * e / iw + da * e / (iw * iw);
}

inline FtValue ft_density(const HyperbolaMeasure& mu, double xi1, double xi2, double tol) {
  const auto& env = mu.envelope();
  const double T = env.window;
  FtValue out;
  out.error = env.outer_tail(T);

  QuadOptions q;
  q.tolerance = tol / 8.0;
  q.max_panel_width = 1.0 / (1.0 + std::fabs(xi1) + std::fabs(xi2));
  auto outer = [&](double t) { return cis_pi(xi1 * t + xi2 / t) * mu.density(t); };
  for (auto [lo, hi] : {std::pair{-T, -1.0}, std::pair{1.0, T}}) {
    const auto r = integrate(outer, lo, hi, q);
    out.value += r.value;
    out.error += r.error;
  }

  if (xi2 == 0.0) {
    for (auto [lo, hi] : {std::pair{-1.0, 0.0}, std::pair{0.0, 1.0}}) {
      const auto r = integrate(outer, lo, hi, q);
      out.value += r.value;
      out.error += r.error;
    }
    return out;
  }

  // 0 < |t| < 1 through t = +-1/s: the 1/t oscillation becomes e^{+-i pi xi2 s}.
  const double omega = std::numbers::pi * std::fabs(xi2);
  const double amp = env.inner_sup;
  const double S = std::clamp(std::cbrt(32.0 * amp / (omega * omega * tol)), 16.0, 1e6);
  const double remainder = 4.0 * amp / (omega * omega * S * S * S);
  for (int sign : {+1, -1}) {
    auto slow = [&](double s) {
      return cis_pi(sign * xi1 / s) * mu.density(sign / s) / (s * s);
    };
    auto inner = [&](double s) { return cis_pi(sign * xi2 * s) * slow(s); };
    const auto r = integrate(inner, 1.0, S, q);
    out.value += r.value + oscillatory_tail(slow, sign * std::numbers::pi * xi2, S, cis_pi(sign * xi2 * S));
    out.error += r.error + remainder;
  }
  return out;
}

}  // namespace detail

inline FtValue ft_eval(const HyperbolaMeasure& mu, double xi1, double xi2, double tol = 1e-10) {
  if (!std::isfinite(xi1) || !std::isfinite(xi2)) throw DomainError("ft_eval: non-finite frequency");
  if (mu.kind() == HyperbolaMeasure::Kind::atoms) {
    FtValue out;
    for (const auto& a : mu.atoms()) out.value += a.weight * cis_pi(xi1 * a.t + xi2 / a.t);
    return out;
  }
  FtValue out = detail::ft_density(mu, xi1, xi2, tol);
  if (out.error > tol)
    throw ConvergenceError("ft_eval: error estimate exceeds the tolerance", out.value, out.error);
  return out;
}

// int |g| (density) or sum |w_k| (atoms).
inline double total_variation(const HyperbolaMeasure& mu, double tol = 1e-10) {
  if (mu.kind() == HyperbolaMeasure::Kind::atoms) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += std::abs(a.weight);
    return s;
  }
  const double T = mu.envelope().window;
  QuadOptions q;
  q.tolerance = tol;
  const auto r = integrate([&](double t) { return cplx(std::abs(mu.density(t))); }, -T, 0.0, q).value +
                 integrate([&](double t) { return cplx(std::abs(mu.density(t))); }, 0.0, T, q).value;
  return r.real() + mu.envelope().outer_tail(T);
}

// ---------------------------------------------------------------------------
// Lattice crosses
// ---------------------------------------------------------------------------

struct CrossPoint {
  char axis;           // 'h': (n + q/p, 0), 'v': (0, beta m)
  std::int64_t index;  // n or m
  double xi1, xi2;
};

class LatticeCross {
 public:
  LatticeCross(int p, int q, double beta, std::int64_t window) : p_(p), q_(q), beta_(beta), n_(window) {
    if (p < 1) throw ParameterError("LatticeCross: p must be positive");
    if (std::gcd(p, q) != 1) throw ParameterError("LatticeCross: gcd(p, q) must be 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("LatticeCross: beta must be positive");
    if (window < 0) throw ParameterError("LatticeCross: window must be >= 0");
  }

  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  double beta() const noexcept { return beta_; }
  std::int64_t window() const noexcept { return n_; }

  // Horizontal arm first, then the vertical one. (0, 0) comes from m = 0 only.
  std::vector<CrossPoint> points() const {
    std::vector<CrossPoint> pts;
    for (std::int64_t n = -n_; n <= n_; ++n) {
      const std::int64_t num = n * p_ + q_;
      if (num == 0) continue;
      pts.push_back({'h', n, static_cast<double>(num) / static_cast<double>(p_), 0.0});
    }
    for (std::int64_t m = -n_; m <= n_; ++m)
      pts.push_back({'v', m, 0.0, beta_ * static_cast<double>(m)});
    return pts;
  }

 private:
  int p_, q_;
  double beta_;
  std::int64_t n_;
};

struct CrossResidual {
  CrossPoint point;
  cplx value;
  double quad_error;
};

struct CrossReport {
  std::vector<CrossResidual> rows;
  double max_modulus = 0.0;
};

template <class Ft>
CrossReport evaluate_on_points(Ft&& ft, const std::vector<CrossPoint>& pts) {
  CrossReport rep;
  rep.rows.resize(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const FtValue v = ft(pts[i].xi1, pts[i].xi2);
    rep.rows[i] = {pts[i], v.value, v.error};
  });
  for (const auto& r : rep.rows) rep.max_modulus = std::max(rep.max_modulus, std::abs(r.value));
  return rep;
}

inline CrossReport ft_on_cross(const HyperbolaMeasure& mu, const LatticeCross& cross, double tol = 1e-10) {
  return evaluate_on_points([&](double a, double b) { return ft_eval(mu, a, b, tol); }, cross.points());
}

inline void write_cross_csv(std::ostream& os, const CrossReport& rep) {
  using detail::format_double;
  os << "axis,index,xi1,xi2,re,im,abs,quad_error\n";
  for (const auto& r : rep.rows) {
    os << r.point.axis << ',' << r.point.index << ',' << format_double(r.point.xi1) << ','
       << format_double(r.point.xi2) << ',' << format_double(r.value.real()) << ','
       << format_double(r.value.imag()) << ',' << format_double(std::abs(r.value)) << ','
       << format_double(r.quad_error) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Klein-Gordon check: (d_xi d_eta + pi^2) mu^ = 0 by centred mixed differences.
// ---------------------------------------------------------------------------

struct KleinGordonReport {
  double max_residual = 0.0;
  double quad_error_bound = 0.0;  // how much of the residual quadrature error could explain
};

template <class Ft>
KleinGordonReport klein_gordon_residual_of(Ft&& ft, const std::vector<double>& xi,
                                           const std::vector<double>& eta, double h) {
  if (!(h > 0.0)) throw ParameterError("klein_gordon_residual: h must be positive");
  KleinGordonReport rep;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (double x : xi) {
    for (double y : eta) {
      const FtValue pp = ft(x + h, y + h), pm = ft(x + h, y - h);
      const FtValue mp = ft(x - h, y + h), mm = ft(x - h, y - h), c = ft(x, y);
      const cplx mixed = (pp.value - pm.value - mp.value + mm.value) / (4.0 * h * h);
      rep.max_residual = std::max(rep.max_residual, std::abs(mixed + pi2 * c.value));
      const double qe = (pp.error + pm.error + mp.error + mm.error) / (4.0 * h * h) + pi2 * c.error;
      rep.quad_error_bound = std::max(rep.quad_error_bound, qe);
    }
  }
  return rep;
}

inline KleinGordonReport klein_gordon_residual(const HyperbolaMeasure& mu, const std::vector<double>& xi,
                                               const std::vector<double>& eta, double h, double tol = 1e-10) {
  return klein_gordon_residual_of([&](double a, double b) { return ft_eval(mu, a, b, tol); }, xi, eta, h);
}

// ---------------------------------------------------------------------------
// Invariance: pushing mu forward by x -> M x + u turns mu^(zeta) into
// e^{i pi u.zeta} mu^(M^T zeta). The pair (T^{-1} Gamma, T^* Lambda) uses
// M = T^{-1}, and points map by T^T, so residuals are unchanged.
// ---------------------------------------------------------------------------

class TransformedMeasure {
 public:
  explicit TransformedMeasure(HyperbolaMeasure base)
      : base_(std::move(base)), linear_(Eigen::Matrix2d::Identity()), shift_(Eigen::Vector2d::Zero()) {}
  TransformedMeasure(HyperbolaMeasure base, Eigen::Matrix2d linear, Eigen::Vector2d shift)
      : base_(std::move(base)), linear_(std::move(linear)), shift_(std::move(shift)) {}

  const HyperbolaMeasure& base() const noexcept { return base_; }
  const Eigen::Matrix2d& linear() const noexcept { return linear_; }
  const Eigen::Vector2d& shift() const noexcept { return shift_; }

  FtValue ft(double xi1, double xi2, double tol = 1e-10) const {
    const Eigen::Vector2d z(xi1, xi2);
    const Eigen::Vector2d w = linear_.transpose() * z;
    FtValue v = ft_eval(base_, w[0], w[1], tol);
    v.value *= cis_pi(shift_.dot(z));
    return v;
  }

 private:
  HyperbolaMeasure base_;
  Eigen::Matrix2d linear_;
  Eigen::Vector2d shift_;
};

struct TransformedPair {
  TransformedMeasure measure;
  std::vector<CrossPoint> points;
};

// (Gamma + u, Lambda + v)
inline TransformedPair invariance_translate(const HyperbolaMeasure& mu, const std::vector<CrossPoint>& pts,
                                            const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  TransformedPair out{TransformedMeasure(mu, Eigen::Matrix2d::Identity(), u), pts};
  for (auto& p : out.points) {
    p.xi1 += v[0];
    p.xi2 += v[1];
  }
  return out;
}

// (T^{-1} Gamma, T^* Lambda)
inline TransformedPair invariance_transform(const HyperbolaMeasure& mu, const std::vector<CrossPoint>& pts,
                                            const Eigen::Matrix2d& T) {
  const double det = T.determinant();
  if (!std::isfinite(det) || std::fabs(det) <= 1e-14 * T.squaredNorm())
    throw DomainError("invariance_transform: T is singular");
  TransformedPair out{TransformedMeasure(mu, T.inverse(), Eigen::Vector2d::Zero()), pts};
  for (auto& p : out.points) {
    const Eigen::Vector2d w = T.transpose() * Eigen::Vector2d(p.xi1, p.xi2);
    p.xi1 = w[0];
    p.xi2 = w[1];
  }
  return out;
}

// T = diag(a, 1/a) keeps Gamma in place: T^{-1}(t, 1/t) = (t/a, a/t).
inline HyperbolaMeasure rescale_atoms(const HyperbolaMeasure& mu, double a) {
  if (a == 0.0 || !std::isfinite(a)) throw DomainError("rescale_atoms: a must be finite and nonzero");
  if (mu.kind() != HyperbolaMeasure::Kind::atoms) throw ParameterError("rescale_atoms: atoms only");
  std::vector<HyperbolaAtom> atoms = mu.atoms();
  for (auto& at : atoms) at.t /= a;
  return HyperbolaMeasure::from_atoms(std::move(atoms));
}

}  // namespace huplab
