#pragma once

// Mod-2 reduction and the Gauss-type interval maps
//
//   tau_beta(x) = {-beta/x}_2   (x != 0),   tau_beta(0) = 0,
//   U_beta(x)   = p * tau_beta(x)
//
// on the circle (-p, p]. The map has countably many monotone branches; branch
// j in Z* covers (beta/(2j+1), beta/(2j-1)] and is inverted by
// h_j(t) = p*beta / (2pj - t). All intervals are half-open (a, b].

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "huplab/errors.hpp"

namespace huplab {

class MapParams {
 public:
  MapParams(int p, double beta) : p_(p), beta_(beta) {
    if (p < 1) throw ParameterError("MapParams: p must be a positive integer");
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw ParameterError("MapParams: beta must be positive and finite");
    beta0_ = beta_ / static_cast<double>(p_);
  }

  int p() const noexcept { return p_; }
  double pd() const noexcept { return static_cast<double>(p_); }
  double beta() const noexcept { return beta_; }
  double beta0() const noexcept { return beta0_; }

  // beta > p lies outside the uniqueness range; everything still evaluates,
  // with branch intervals that reach past (-p, p] clipped to it.
  bool exploration() const noexcept { return beta_ > pd(); }

  bool in_domain(double x) const noexcept { return x > -pd() && x <= pd(); }
  bool in_window(double x) const noexcept { return x > -beta_ && x <= beta_; }

  friend bool operator==(const MapParams&, const MapParams&) = default;

 private:
  int p_;
  double beta_;
  double beta0_;
};

// Quotient and remainder of u modulo 2 with the remainder in (-1, 1]:
// u == 2 * quotient + remainder exactly (for |u| < 2^53).
struct Mod2Split {
  double quotient;
  double remainder;
};

inline Mod2Split mod2_split(double u) {
  if (!std::isfinite(u)) throw DomainError("mod2: non-finite input");
  // IEEE remainder is exact; it rounds the quotient half-to-even, so the only
  // fix-up needed for the (-1, 1] convention is the left endpoint.
  double r = std::remainder(u, 2.0);
  if (r == -1.0) r = 1.0;
  return {(u - r) * 0.5, r};
}

// {u}_2: the unique r in (-1, 1] with u - r in 2Z.
inline double mod2(double u) { return mod2_split(u).remainder; }

inline void require_domain(double x, const MapParams& params, const char* who) {
  if (!std::isfinite(x) || !params.in_domain(x))
    throw DomainError(std::string(who) + ": argument outside (-p, p]");
}

inline double gauss_tau(double x, const MapParams& params) {
  require_domain(x, params, "gauss_tau");
  if (x == 0.0) return 0.0;
  return mod2(-params.beta() / x);
}

inline double gauss_u(double x, const MapParams& params) {
  return params.pd() * gauss_tau(x, params);
}

// Branch j with x in (beta/(2j+1), beta/(2j-1)], so that
// tau_beta(x) = -beta/x + 2j.
inline std::int64_t branch_index(double x, const MapParams& params) {
  if (x == 0.0 || !std::isfinite(x)) throw DomainError("branch_index: x must be nonzero");
  if (!params.in_window(x)) throw DomainError("branch_index: x outside (-beta, beta]");
  const double u = -params.beta() / x;
  if (std::fabs(u) > 0x1p62) throw DomainError("branch_index: index overflows int64");
  return -static_cast<std::int64_t>(mod2_split(u).quotient);
}

// h_j(t) = p*beta / (2pj - t), the inverse of U_beta on branch j.
inline double branch_inverse(double t, std::int64_t j, const MapParams& params) {
  if (j == 0) throw DomainError("branch_inverse: branch index must be nonzero");
  require_domain(t, params, "branch_inverse");
  const double p = params.pd();
  return p * params.beta() / (2.0 * p * static_cast<double>(j) - t);
}

// Derivative of tau_beta away from its discontinuities.
inline double gauss_deriv(double x, const MapParams& params) {
  if (x == 0.0) throw DomainError("gauss_deriv: singular at 0");
  return params.beta() / (x * x);
}

// True when x sits on a branch endpoint beta/(2j +- 1) or at 0, i.e. where
// U_beta jumps.
inline bool is_branch_endpoint(double x, const MapParams& params) {
  if (x == 0.0) return true;
  return mod2(-params.beta() / x) == 1.0;
}

// Looser version used when laying out sample grids: x is within a relative
// distance `rel` of an endpoint.
inline bool near_branch_endpoint(double x, const MapParams& params, double rel = 1e-12) {
  if (x == 0.0) return true;
  const double u = -params.beta() / x;
  const double r = mod2(u);
  return 1.0 - std::fabs(r) <= rel * std::fmax(1.0, std::fabs(u));
}

struct Orbit {
  std::vector<double> points;      // points[k] = U_beta^k(x0), k = 0..n
  std::size_t survivor_steps = 0;  // leading iterates inside (-beta, beta]
  bool hit_zero = false;
};

inline Orbit orbit(double x0, std::size_t n, const MapParams& params) {
  require_domain(x0, params, "orbit");
  if (n < 1) throw ParameterError("orbit: need at least one step");
  Orbit out;
  out.points.reserve(n + 1);
  out.points.push_back(x0);
  bool surviving = true;
  double x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    if (surviving && params.in_window(x))
      ++out.survivor_steps;
    else
      surviving = false;
    x = gauss_u(x, params);
    out.points.push_back(x);
  }
  for (double y : out.points)
    if (y == 0.0) out.hit_zero = true;
  return out;
}

}  // namespace huplab
