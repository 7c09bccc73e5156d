#pragma once

// Pointwise evaluation of the operators attached to U_beta:
//
//   Perron-Frobenius  P_beta[f](x) = sum_{j in Z*} p*beta/(2pj - x)^2 f(p*beta/(2pj - x))
//   Koopman           C_beta[phi](x) = phi(U_beta(x)) chi_{(-beta, beta]}(x)
//   S[phi](x)        = phi(p {x/p}_2) chi_{R \ (-p, p]}(x)
//   T_beta[psi](x)   = psi(beta / {beta/x}_2) chi_{(-beta, beta]}(x)
//   T_beta S[phi](x) = phi(p {beta0 / {beta/x}_2}_2) chi_{E_beta}(x)
//
// Functions are any callables double -> (double | complex). Functions on
// (-p, p] are taken to vanish outside it.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>

#include "huplab/detail/series.hpp"
#include "huplab/errors.hpp"
#include "huplab/gaussmap.hpp"
#include "huplab/grid.hpp"

namespace huplab {

struct PfValue {
  cplx value;            // branch sum over 0 < |j| <= J
  double tail_bound;     // sup|f| times a rigorous bound on the omitted weights
  cplx tail_estimate;    // omitted branches with f frozen at the first omitted preimage

  cplx corrected() const noexcept { return value + tail_estimate; }
};

// sum_{|j| > J} p*beta/(2pj - x)^2 <= (beta/p) / (2J - 1) for |x| <= p.
inline double pf_weight_tail_bound(const MapParams& params, std::int64_t cutoff) {
  return params.beta0() / (2.0 * static_cast<double>(cutoff) - 1.0);
}

template <class F>
PfValue pf_apply(F&& f, double x, const MapParams& params, std::int64_t cutoff, double sup_norm) {
  if (cutoff < 2) throw ParameterError("pf_apply: cutoff J must be >= 2");
  require_domain(x, params, "pf_apply");
  const double p = params.pd();
  const double pb = p * params.beta();
  auto eval = [&](double y) -> cplx {
    if (!params.in_domain(y)) return {};
    return cplx(f(y));
  };

  // Outermost branches first so the small terms are accumulated before the large ones.
  cplx sum{};
  for (std::int64_t j = cutoff; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    const double dp = 2.0 * p * jd - x;
    const double dn = -2.0 * p * jd - x;
    sum += (pb / (dp * dp)) * eval(pb / dp);
    sum += (pb / (dn * dn)) * eval(pb / dn);
  }

  PfValue out{sum, sup_norm * pf_weight_tail_bound(params, cutoff), {}};
  // sum_{j > J} p*beta / (2p)^2 / (j - x/2p)^2 = (beta / 4p) psi'(J + 1 -+ x/2p)
  const double jn = static_cast<double>(cutoff + 1);
  const double w_pos = params.beta0() * 0.25 * detail::trigamma(jn - x / (2.0 * p));
  const double w_neg = params.beta0() * 0.25 * detail::trigamma(jn + x / (2.0 * p));
  out.tail_estimate = w_pos * eval(pb / (2.0 * p * jn - x)) + w_neg * eval(pb / (-2.0 * p * jn - x));
  return out;
}

inline PfValue pf_apply(const GridFunction& f, double x, std::int64_t cutoff) {
  return pf_apply(f, x, f.params(), cutoff, f.sup_norm());
}

inline PfValue pf_apply(const GridDensity& f, double x, std::int64_t cutoff) {
  return pf_apply(f, x, f.params(), cutoff, f.sup_norm());
}

template <class F>
cplx koopman_apply(F&& phi, double x, const MapParams& params) {
  require_domain(x, params, "koopman_apply");
  if (!params.in_window(x)) return {};
  if (x != 0.0 && is_branch_endpoint(x, params))
    throw AmbiguityError("koopman_apply: x is a branch endpoint of U_beta");
  return cplx(phi(gauss_u(x, params)));
}

// C_beta applied twice.
template <class F>
cplx koopman_squared(F&& phi, double x, const MapParams& params) {
  return koopman_apply([&](double y) { return koopman_apply(phi, y, params); }, x, params);
}

template <class F>
cplx s_apply(F&& phi, double x, int p) {
  if (!std::isfinite(x)) throw DomainError("s_apply: non-finite argument");
  const double pd = static_cast<double>(p);
  if (x > -pd && x <= pd) return {};
  return cplx(phi(pd * mod2(x / pd)));
}

template <class F>
cplx t_beta_apply(F&& psi, double x, double beta) {
  if (!std::isfinite(x)) throw DomainError("t_beta_apply: non-finite argument");
  if (!(x > -beta && x <= beta)) return {};
  if (x == 0.0) throw DomainError("t_beta_apply: x = 0 has no image");
  const double s = mod2(beta / x);
  if (s == 0.0) throw DomainError("t_beta_apply: {beta/x}_2 = 0");
  return cplx(psi(beta / s));
}

// Membership in E_beta = { x in (-beta, beta] \ {0} : beta0 / {beta/x}_2 outside (-1, 1] }.
inline bool in_e_beta(double x, const MapParams& params) {
  if (x == 0.0 || !params.in_window(x)) return false;
  const double s = mod2(params.beta() / x);
  if (s == 0.0) return false;
  const double q = params.beta() / (params.pd() * s);
  return q <= -1.0 || q > 1.0;
}

template <class F>
cplx ts_apply(F&& phi, double x, const MapParams& params) {
  require_domain(x, params, "ts_apply");
  if (!params.in_window(x)) return {};
  if (x != 0.0 && is_branch_endpoint(x, params))
    throw AmbiguityError("ts_apply: x is a branch endpoint of U_beta");
  if (!in_e_beta(x, params)) return {};
  const double s = mod2(params.beta() / x);
  // beta0 / s is evaluated as beta / (p s), the same rounding as U_beta(U_beta(x)).
  const double q = params.beta() / (params.pd() * s);
  return cplx(phi(params.pd() * mod2(q)));
}

// max over the grid of |(I - T_beta S)[phi] - (I + C_beta)(I - C_beta)[phi]|.
template <class F>
double factorization_residual(F&& phi, std::span<const double> grid, const MapParams& params) {
  auto diff = [&](double y) { return cplx(phi(y)) - koopman_apply(phi, y, params); };
  double worst = 0.0;
  for (double x : grid) {
    const cplx lhs = cplx(phi(x)) - ts_apply(phi, x, params);
    const cplx rhs = diff(x) + koopman_apply(diff, x, params);
    worst = std::fmax(worst, std::abs(lhs - rhs));
  }
  return worst;
}

// max over the grid of |T_beta S[phi] - C_beta^2[phi]|.
template <class F>
double ts_koopman_residual(F&& phi, std::span<const double> grid, const MapParams& params) {
  double worst = 0.0;
  for (double x : grid)
    worst = std::fmax(worst, std::abs(ts_apply(phi, x, params) - koopman_squared(phi, x, params)));
  return worst;
}

}  // namespace huplab
