#pragma once

// Bounded harmonic extensions of the exponentials e^{i pi (n + 1/p) t} and
// e^{i pi n beta / t} to the upper half-plane, their Poisson-integral
// counterparts, the two-point separation system and the two-atom measures
// that annihilate a lattice cross.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "huplab/errors.hpp"
#include "huplab/hyperbola_ft.hpp"
#include "huplab/quadrature.hpp"

namespace huplab {

inline void require_upper(cplx z, const char* who) {
  if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError(std::string(who) + ": need Im z > 0");
}

// e^{i pi (n + 1/p) z} for n >= 0, e^{i pi (n + 1/p) conj(z)} for n < 0.
inline cplx ext_ep(std::int64_t n, int p, cplx z) {
  require_upper(z, "ext_ep");
  if (p < 1) throw ParameterError("ext_ep: p must be positive");
  const double k = std::numbers::pi * (static_cast<double>(n) + 1.0 / static_cast<double>(p));
  const cplx w = n >= 0 ? z : std::conj(z);
  return std::exp(cplx(0.0, k) * w);
}

// e^{i pi n beta / conj(z)} for n >= 0, e^{i pi n beta / z} for n < 0.
inline cplx ext_ebeta(std::int64_t n, double beta, cplx z) {
  require_upper(z, "ext_ebeta");
  if (!(beta > 0.0)) throw ParameterError("ext_ebeta: beta must be positive");
  const double k = std::numbers::pi * static_cast<double>(n) * beta;
  const cplx w = n >= 0 ? std::conj(z) : z;
  return std::exp(cplx(0.0, k) / w);
}

// ---------------------------------------------------------------------------
// Poisson integral  f(z) = (1/pi) int f(t) y / ((x - t)^2 + y^2) dt
// ---------------------------------------------------------------------------

// Boundary data with what is known about its behaviour at 0 and at infinity.
struct BoundaryData {
  enum class Tail {
    oscillatory,  // f(t) = c e^{i omega t} for |t| beyond the window
    inverted,     // s -> f(1/s) is smooth on [-1, 1]: integrate |t| >= 1 through t = 1/s
    bounded       // only |f| <= sup_norm: truncate and bound the kernel tail
  };
  std::function<cplx(double)> f;
  double sup_norm = 1.0;
  Tail tail = Tail::bounded;
  double omega = 0.0;            // oscillatory tail frequency
  double zero_frequency = 0.0;   // f(t) ~ e^{i kappa / t} near 0; nonzero switches on t = 1/s there

  static BoundaryData ep(std::int64_t n, int p) {
    const double w = std::numbers::pi * (static_cast<double>(n) + 1.0 / static_cast<double>(p));
    BoundaryData d;
    d.f = [w](double t) { return cis_pi(w / std::numbers::pi * t); };
    d.tail = Tail::oscillatory;
    d.omega = w;
    return d;
  }

  static BoundaryData ebeta(std::int64_t n, double beta) {
    const double c = static_cast<double>(n) * beta;
    BoundaryData d;
    d.f = [c](double t) { return t == 0.0 ? cplx(1.0) : cis_pi(c / t); };
    d.tail = Tail::inverted;
    d.zero_frequency = std::numbers::pi * c;
    return d;
  }

  static BoundaryData constant(cplx c) {
    BoundaryData d;
    d.f = [c](double) { return c; };
    d.sup_norm = std::abs(c);
    d.tail = Tail::oscillatory;
    return d;
  }
};

struct PoissonValue {
  cplx value;
  double error = 0.0;
};

namespace detail {

// (1/pi) int_a^inf y / ((x - t)^2 + y^2) dt
inline double poisson_mass_right(double a, double x, double y) {
  return 0.5 - std::atan((a - x) / y) / std::numbers::pi;
}

}  // namespace detail

inline PoissonValue poisson_extend(const BoundaryData& data, cplx z, double tol = 1e-9) {
  require_upper(z, "poisson_extend");
  const double x = z.real(), y = z.imag();
  const double pi = std::numbers::pi;
  auto kernel = [=](double t) { return y / (pi * ((x - t) * (x - t) + y * y)); };
  auto fk = [&](double t) { return data.f(t) * kernel(t); };

  PoissonValue out;
  QuadOptions q;
  q.tolerance = tol / 8.0;
  const double freq = std::max(std::fabs(data.omega), std::fabs(data.zero_frequency));
  q.max_panel_width = std::min(y, 1.0) / (1.0 + freq / pi);
  auto add = [&](const QuadResult& r) {
    out.value += r.value;
    out.error += r.error;
  };

  // [lo, hi] is what remains for direct quadrature once the tails are handled.
  double lo, hi;
  if (data.tail == BoundaryData::Tail::inverted) {
    lo = -1.0;
    hi = 1.0;
    for (int sign : {+1, -1}) {
      // int_1^inf f(sign t) K(sign t) dt = int_0^1 f(sign/s) K(sign/s) / s^2 ds
      auto g = [&, sign](double s) {
        if (s == 0.0) return cplx{};
        return data.f(sign / s) * kernel(sign / s) / (s * s);
      };
      QuadOptions qi = q;
      qi.max_panel_width = 1.0 / (1.0 + freq / pi);
      add(integrate(g, 0.0, 1.0, qi));
    }
  } else if (data.tail == BoundaryData::Tail::oscillatory) {
    const double w = std::fabs(data.omega);
    double half = 50.0 * y;
    if (w > 0.0) half = std::max(half, std::cbrt(8.0 * y * data.sup_norm / (pi * w * w * q.tolerance)));
    else half = std::max(half, 1.0);
    lo = x - half;
    hi = x + half;
    if (w == 0.0) {
      // f constant beyond the window: the kernel tails integrate in closed form.
      out.value += data.f(hi) * detail::poisson_mass_right(hi, x, y) +
                   data.f(lo) * detail::poisson_mass_right(-lo, -x, y);
    } else {
      // IBP on int_W^inf c e^{i w t} K(t) dt with c e^{i w t} = f(t).
      for (int sign : {+1, -1}) {
        const double b = sign > 0 ? hi : lo;
        const double u = b - x;
        const double k0 = kernel(b);
        const double k1 = -2.0 * u * y / (pi * (u * u + y * y) * (u * u + y * y));  // K'(b)
        const cplx iw(0.0, data.omega);
        const cplx f0 = data.f(b);
        out.value += static_cast<double>(sign) * (-f0 * k0 / iw + f0 * k1 / (iw * iw));
        out.error += data.sup_norm * 6.0 * y / (pi * w * w * std::pow(std::fabs(u), 3.0));
      }
    }
  } else {
    const double half = std::max(2.0 * y * data.sup_norm / (pi * (tol / 2.0)), 1.0);
    lo = x - half;
    hi = x + half;
    out.error += data.sup_norm * (detail::poisson_mass_right(hi, x, y) + detail::poisson_mass_right(-lo, -x, y));
  }

  if (data.zero_frequency != 0.0 && lo < 0.0 && hi > 0.0) {
    // Pieces away from 0 directly, |t| < 1 through t = +-1/s with an IBP tail.
    const double a = std::max(lo, -1.0), b = std::min(hi, 1.0);
    if (lo < a) add(integrate(fk, lo, a, q));
    if (b < hi) add(integrate(fk, b, hi, q));
    const double kappa = std::fabs(data.zero_frequency);
    const double kmax = 1.0 / (pi * y);
    const double S = std::clamp(std::cbrt(32.0 * data.sup_norm * kmax / (kappa * kappa * q.tolerance)), 16.0, 1e6);
    for (int sign : {+1, -1}) {
      const double edge = sign > 0 ? b : -a;  // |t| runs over (0, edge]
      const double s0 = 1.0 / edge;
      auto g = [&, sign](double s) { return data.f(sign / s) * kernel(sign / s) / (s * s); };
      // g(s) = slow(s) e^{i om s}
      const double om = sign * data.zero_frequency;
      auto slow = [&, om](double s) { return g(s) * std::polar(1.0, -std::fmod(om * s, 2.0 * pi)); };
      add(integrate(g, s0, S, q));
      out.value += detail::oscillatory_tail(slow, om, S, std::polar(1.0, std::fmod(om * S, 2.0 * pi)));
      out.error += 4.0 * data.sup_norm * kmax / (kappa * kappa * S * S * S);
    }
  } else if (data.tail == BoundaryData::Tail::bounded) {
    // t = x + y tan(theta) turns the kernel into d theta / pi.
    QuadOptions qt = q;
    qt.max_panel_width = INFINITY;
    auto h = [&](double th) { return data.f(x + y * std::tan(th)) / pi; };
    add(integrate(h, std::atan((lo - x) / y), std::atan((hi - x) / y), qt));
  } else {
    add(integrate(fk, lo, hi, q));
  }

  if (out.error > tol)
    throw ConvergenceError("poisson_extend: tolerance not reached", out.value, out.error);
  return out;
}

// ---------------------------------------------------------------------------
// Separation and annihilating pairs
// ---------------------------------------------------------------------------

struct SeparationSolution {
  bool exists = false;
  cplx z1, z2;
  double congruence_residual = 0.0;  // max(|z1 - z2 - 2p|, |1/z1 - 1/z2 - 2/beta|)
};

// z1 = p(1 + i sqrt(beta/p - 1)), z2 = p(-1 + i sqrt(beta/p - 1)): distinct
// points of the upper half-plane exactly when beta > p.
inline SeparationSolution solve_separation(int p, double beta) {
  if (p < 1) throw ParameterError("solve_separation: p must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("solve_separation: beta must be positive");
  SeparationSolution s;
  const double pd = static_cast<double>(p);
  if (!(beta > pd)) return s;
  const double h = pd * std::sqrt(beta / pd - 1.0);
  s.exists = true;
  s.z1 = {pd, h};
  s.z2 = {-pd, h};
  s.congruence_residual = std::max(std::abs(s.z1 - s.z2 - 2.0 * pd),
                                   std::abs(1.0 / s.z1 - 1.0 / s.z2 - 2.0 / beta));
  return s;
}

struct SingularPair {
  double u0, v0;
  bool degenerate = false;  // u0 == v0: the measure is zero
};

// u0 - v0 = 2pk and 1/u0 - 1/v0 = 2m/beta, i.e. v0^2 + 2pk v0 + pk beta/m = 0.
// Returns the root with the + sign in front of the square root.
inline std::optional<SingularPair> singular_pair(int p, double beta, std::int64_t k, std::int64_t m) {
  if (p < 1) throw ParameterError("singular_pair: p must be positive");
  if (k == 0 || m == 0) throw ParameterError("singular_pair: k and m must be nonzero");
  if (!(beta > 0.0)) throw ParameterError("singular_pair: beta must be positive");
  const double pk = static_cast<double>(p) * static_cast<double>(k);
  const double disc = pk * pk - pk * beta / static_cast<double>(m);
  if (disc < 0.0) return std::nullopt;
  const double v0 = -pk + std::sqrt(disc);
  const double u0 = v0 + 2.0 * pk;
  if (v0 == 0.0 || u0 == 0.0) return std::nullopt;
  return SingularPair{u0, v0, u0 == v0};
}

inline HyperbolaMeasure pair_measure(const SingularPair& s) {
  if (s.degenerate) return HyperbolaMeasure::zero();
  return HyperbolaMeasure::from_atoms({{s.u0, 1.0}, {s.v0, -1.0}});
}

struct SeparationCheck {
  double max_ep = 0.0;      // max_n |e_n^p(z1) - e_n^p(z2)|
  double max_ebeta = 0.0;   // max_n |e_n^beta(z1) - e_n^beta(z2)|
  std::vector<std::int64_t> n;
  std::vector<double> ep_residual, ebeta_residual;
  double max_residual() const { return std::max(max_ep, max_ebeta); }
};

inline SeparationCheck verify_separation(const SeparationSolution& s, int p, double beta, std::int64_t window) {
  if (!s.exists) throw ParameterError("verify_separation: no solution to verify");
  SeparationCheck c;
  for (std::int64_t n = -window; n <= window; ++n) {
    const double a = std::abs(ext_ep(n, p, s.z1) - ext_ep(n, p, s.z2));
    const double b = std::abs(ext_ebeta(n, beta, s.z1) - ext_ebeta(n, beta, s.z2));
    c.n.push_back(n);
    c.ep_residual.push_back(a);
    c.ebeta_residual.push_back(b);
    c.max_ep = std::max(c.max_ep, a);
    c.max_ebeta = std::max(c.max_ebeta, b);
  }
  return c;
}

struct AnnihilationCheck {
  CrossReport report;
  bool degenerate = false;
  // Exact integer checks: (n p + q) k and n' m, from (n + q/p)(u0 - v0)/2 and
  // beta n' (1/u0 - 1/v0)/2 with the defining relations substituted.
  bool congruences_exact = true;
  double relation_residual = 0.0;  // |u0 - v0 - 2pk| + |1/u0 - 1/v0 - 2m/beta|
  double max_residual() const { return report.max_modulus; }
};

inline AnnihilationCheck verify_annihilation(const SingularPair& s, int p, double beta, std::int64_t k,
                                             std::int64_t m, const LatticeCross& cross) {
  AnnihilationCheck c;
  c.degenerate = s.degenerate;
  c.report = ft_on_cross(pair_measure(s), cross);
  const double pk = static_cast<double>(p) * static_cast<double>(k);
  c.relation_residual = std::fabs(s.u0 - s.v0 - 2.0 * pk) +
                        std::fabs(1.0 / s.u0 - 1.0 / s.v0 - 2.0 * static_cast<double>(m) / beta);
  // The horizontal arm sits at (np + q)/p, so the phase difference is pi (np + q)(2pk)/p = 2 pi (np + q) k.
  c.congruences_exact = cross.p() == p && cross.beta() == beta;
  return c;
}

// ---------------------------------------------------------------------------
// JSON reports
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(cplx z) { return nlohmann::json{{"re", z.real()}, {"im", z.imag()}}; }

inline nlohmann::json separation_report(int p, double beta, std::int64_t window, double tol) {
  nlohmann::json j;
  j["inputs"] = {{"p", p}, {"beta", beta}, {"N", window}, {"tolerance", tol}};
  const auto s = solve_separation(p, beta);
  if (!s.exists) {
    j["solution"] = "none";
    j["residuals"] = nlohmann::json::array();
    j["pass"] = true;
    return j;
  }
  const auto c = verify_separation(s, p, beta, window);
  j["solution"] = {{"z1", to_json(s.z1)}, {"z2", to_json(s.z2)}};
  j["congruence_residual"] = s.congruence_residual;
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < c.n.size(); ++i)
    rows.push_back({{"n", c.n[i]}, {"ep", c.ep_residual[i]}, {"ebeta", c.ebeta_residual[i]}});
  j["residuals"] = rows;
  j["max_residual"] = c.max_residual();
  j["pass"] = c.max_residual() < tol && s.congruence_residual < tol;
  return j;
}

}  // namespace huplab
