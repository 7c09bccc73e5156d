#pragma once

// Lebesgue measure of the survivor sets
//
//   E_beta(n) = { x in (-p, p] : U_beta^k(x) in (-beta, beta] for k = 0..n-1 }.
//
// E_beta(1) = (-beta, beta] and E_beta(n+1) = union_j h_j(E_beta(n)), so the
// exact-interval method walks the tree of branch-inverse images depth first.
// Pieces shorter than `min_piece` (and the whole tail of branches beyond the
// first short one, whose mass is known in closed form) are not expanded. They
// are binned by position, and the measure their descendants add k levels
// further down is
//
//   lower   0
//   middle  sum_l mass_l * rho_k(l),  rho_k = P_beta^k 1 from a coarse Ulam matrix
//   upper   mass * W^k,  W = sup_x sum_j p beta/(2pj - x)^2 = (beta/p)(pi^2/4 - 1)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "huplab/errors.hpp"
#include "huplab/gaussmap.hpp"
#include "huplab/ulam.hpp"

namespace huplab {

enum class EscapeMethod { exact_intervals, monte_carlo };

inline const char* to_string(EscapeMethod m) {
  return m == EscapeMethod::exact_intervals ? "exact-intervals" : "monte-carlo";
}

struct EscapeOptions {
  EscapeMethod method = EscapeMethod::exact_intervals;
  double min_piece = 1e-8;                // exact: shortest piece that is expanded
  std::size_t node_cap = 50'000'000;      // exact: pieces visited before giving up
  std::size_t density_bins = 256;         // exact: resolution of the descendant-density model
  std::size_t samples = 1'000'000;        // monte carlo
  std::uint64_t seed = 20240607;          // monte carlo, std::mt19937_64
};

struct EscapeEstimate {
  double measure = 0.0;
  double error_bound = 0.0;  // exact: rigorous half-width; monte carlo: one standard error
};

// Uniform weight bound W: sum_j |h_j'(x)| at x = +-p.
inline double escape_weight_bound(const MapParams& params) {
  return params.beta0() * (std::numbers::pi * std::numbers::pi / 4.0 - 1.0);
}

namespace detail {

inline std::vector<EscapeEstimate> escape_exact(std::size_t n_steps, const MapParams& params,
                                                const EscapeOptions& opt) {
  const double p = params.pd(), pb = p * params.beta();
  const std::size_t nb = opt.density_bins + opt.density_bins % 2;  // 0 must be a bin edge
  const BinGrid bins(params.p(), nb);
  const double w = bins.width();
  std::vector<double> kept(n_steps + 1, 0.0);
  std::vector<std::vector<double>> pruned(n_steps + 1, std::vector<double>(nb, 0.0));

  struct Piece {
    double a, b;
    std::size_t depth;
  };
  std::vector<Piece> stack{{-params.beta(), params.beta(), 1}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    const Piece piece = stack.back();
    stack.pop_back();
    if (++visited > opt.node_cap)
      throw ResourceError("escape_measure: exact-interval piece count exceeds the cap of " +
                          std::to_string(opt.node_cap) + "; use the monte-carlo method");
    kept[piece.depth] += piece.b - piece.a;
    if (piece.depth == n_steps) continue;
    auto& hist = pruned[piece.depth + 1];
    for (int side : {+1, -1}) {
      std::int64_t m = 1;
      for (;; ++m) {
        const double two_pj = 2.0 * p * static_cast<double>(side * m);
        const double da = two_pj - piece.a, db = two_pj - piece.b;
        const double len = pb * (piece.b - piece.a) / (da * db);
        if (len < opt.min_piece) break;
        stack.push_back({pb / da, pb / db, piece.depth + 1});
      }
      // Short pieces away from 0 are binned one by one, the rest of the tail in one go.
      for (;; ++m) {
        const double two_pj = 2.0 * p * static_cast<double>(side * m);
        const double da = two_pj - piece.a, db = two_pj - piece.b;
        const double lo = pb / da, hi = pb / db;
        if (side > 0 ? hi <= w : lo >= -w) break;
        hist[bins.index_of(0.5 * (lo + hi))] += pb * (piece.b - piece.a) / (da * db);
      }
      const UlamTailGroup tail{side, m, -1, 0};
      hist[bins.index_of(side > 0 ? 0.5 * w : -0.5 * w)] +=
          group_image_length(tail, piece.a, piece.b, params);
    }
  }

  // Bin masses of P_beta^k 1, k = 0..n_steps.
  const UlamMatrix coarse = ulam_assemble(nb, params, 200, UlamTail::closed);
  std::vector<Eigen::VectorXd> rho{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(nb), w)};
  for (std::size_t k = 1; k <= n_steps; ++k) rho.push_back(coarse.entries * rho.back());

  const double weight = escape_weight_bound(params);
  std::vector<double> pruned_total(n_steps + 1, 0.0);
  for (std::size_t d = 0; d <= n_steps; ++d)
    for (double v : pruned[d]) pruned_total[d] += v;

  std::vector<EscapeEstimate> out(n_steps);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double lo = kept[n] + pruned_total[n];
    double mid = lo, hi = lo;
    for (std::size_t d = 2; d < n; ++d) {
      const std::size_t k = n - d;
      for (std::size_t l = 0; l < nb; ++l) mid += pruned[d][l] * rho[k][static_cast<Eigen::Index>(l)] / w;
      hi += pruned_total[d] * std::pow(weight, static_cast<double>(k));
    }
    mid = std::clamp(mid, lo, hi);
    out[n - 1] = {mid, std::max(mid - lo, hi - mid)};
  }
  return out;
}

inline std::vector<EscapeEstimate> escape_monte_carlo(std::size_t n_steps, const MapParams& params,
                                                      const EscapeOptions& opt) {
  if (opt.samples < 1) throw ParameterError("escape_measure: need at least one sample");
  const double p = params.pd();
  std::vector<std::size_t> survivors(n_steps + 1, 0);
  std::mt19937_64 rng(opt.seed);
  for (std::size_t s = 0; s < opt.samples; ++s) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;  // [0, 1)
    double x = p - 2.0 * p * u;                                    // (-p, p]
    for (std::size_t k = 0; k < n_steps; ++k) {
      if (!params.in_window(x)) break;
      ++survivors[k + 1];
      x = gauss_u(x, params);
    }
  }
  std::vector<EscapeEstimate> out(n_steps);
  const auto total = static_cast<double>(opt.samples);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double f = static_cast<double>(survivors[n]) / total;
    out[n - 1] = {2.0 * p * f, 2.0 * p * std::sqrt(f * (1.0 - f) / total)};
  }
  return out;
}

}  // namespace detail

// |E_beta(n)| for n = 1..n_steps (entry n-1).
inline std::vector<EscapeEstimate> escape_profile(std::size_t n_steps, const MapParams& params,
                                                  const EscapeOptions& opt = {}) {
  if (n_steps < 1) throw ParameterError("escape_measure: n_steps must be >= 1");
  if (params.beta() >= params.pd())
    return std::vector<EscapeEstimate>(n_steps, {2.0 * params.pd(), 0.0});
  if (opt.method == EscapeMethod::monte_carlo) return detail::escape_monte_carlo(n_steps, params, opt);
  if (!(opt.min_piece > 0.0)) throw ParameterError("escape_measure: min_piece must be positive");
  return detail::escape_exact(n_steps, params, opt);
}

inline EscapeEstimate escape_measure(std::size_t n_steps, const MapParams& params,
                                     const EscapeOptions& opt = {}) {
  return escape_profile(n_steps, params, opt).back();
}

}  // namespace huplab
