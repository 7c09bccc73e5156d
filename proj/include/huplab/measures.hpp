#pragma once

// The sigma-finite invariant measure d omega = dx / (p^2 - x^2) of U and the
// partial-fraction identity behind its invariance,
//
//   sum_{j in Z*} 1 / ((2pj - t)^2 - p^2) = 1 / (p^2 - t^2),   |t| < p,
//
// plus ratio ergodic averages along |U| orbits.

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "huplab/errors.hpp"
#include "huplab/gaussmap.hpp"

namespace huplab {

inline double omega_density(double x, int p) {
  if (p < 1) throw ParameterError("omega_density: p must be positive");
  const double pd = static_cast<double>(p);
  if (!(std::fabs(x) < pd)) throw DomainError("omega_density: |x| >= p has infinite density");
  return 1.0 / ((pd - x) * (pd + x));
}

struct PartialFractionSum {
  double value = 0.0;          // sum over 0 < |j| <= J
  double tail_bound = 0.0;     // rigorous bound on the omitted |j| > J part
  double tail_estimate = 0.0;  // Euler-Maclaurin (midpoint) estimate of that part

  double corrected() const noexcept { return value + tail_estimate; }
};

inline PartialFractionSum partial_fraction_sum(double t, int p, std::int64_t cutoff) {
  if (p < 1) throw ParameterError("partial_fraction_sum: p must be positive");
  if (cutoff < 2) throw ParameterError("partial_fraction_sum: cutoff J must be >= 2");
  const double pd = static_cast<double>(p);
  if (!(std::fabs(t) < pd)) throw DomainError("partial_fraction_sum: need |t| < p");

  PartialFractionSum out;
  // Fixed order: j = J down to 1 on each side, small terms first.
  double pos = 0.0, neg = 0.0;
  for (std::int64_t j = cutoff; j >= 1; --j) {
    const double two_pj = 2.0 * pd * static_cast<double>(j);
    const double a = two_pj - t;  // j > 0
    const double b = two_pj + t;  // -j
    pos += 1.0 / ((a - pd) * (a + pd));
    neg += 1.0 / ((b - pd) * (b + pd));
  }
  out.value = pos + neg;

  // For |t| < p and |j| >= 1: (2pj - t)^2 - p^2 > p^2 ((2|j| - 1)^2 - 1) = 4p^2 |j|(|j| - 1),
  // and sum_{j > J} 1/(4p^2 j (j-1)) = 1/(4 p^2 J) telescopes. Two sides.
  const double jd = static_cast<double>(cutoff);
  out.tail_bound = 1.0 / (2.0 * pd * pd * jd);

  // int_{J+1/2}^inf dj / ((2pj -+ t)^2 - p^2) = log1p(2p / (u - p)) / (4p^2), u = 2p(J+1/2) -+ t
  const double mid = 2.0 * pd * (jd + 0.5);
  const double up = mid - t, un = mid + t;
  out.tail_estimate =
      (std::log1p(2.0 * pd / (up - pd)) + std::log1p(2.0 * pd / (un - pd))) / (4.0 * pd * pd);
  return out;
}

struct HopfAverage {
  double ratio = 0.0;
  std::size_t steps = 0;
  bool exploratory = true;  // no convergence rate is known for infinite-measure ratio averages
};

// (sum_{k<n} f(|U|^k x0)) / (sum_{k<n} g(|U|^k x0)) for the full-branch map (beta = p).
template <class F, class G>
HopfAverage hopf_ratio_average(F&& f, G&& g, double x0, std::size_t n, const MapParams& params) {
  if (params.beta() != params.pd())
    throw ParameterError("hopf_ratio_average: requires beta == p");
  if (!(x0 > 0.0 && x0 <= params.pd())) throw DomainError("hopf_ratio_average: x0 must lie in (0, p]");
  if (n < 1) throw ParameterError("hopf_ratio_average: need at least one step");
  double num = 0.0, den = 0.0;
  double x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    num += std::real(f(x));
    den += std::real(g(x));
    x = std::fabs(gauss_u(x, params));
  }
  if (den == 0.0) throw DegenerateOrbitError("hopf_ratio_average: denominator sum is zero");
  return {num / den, n, true};
}

}  // namespace huplab
