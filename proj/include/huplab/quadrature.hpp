#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for complex-valued
// integrands on finite intervals, plus the e^{i pi x} helper shared by the
// Fourier code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <vector>

#include "huplab/errors.hpp"

namespace huplab {

using cplx = std::complex<double>;

// e^{i pi x} with x reduced mod 2 first, so large arguments keep their phase.
inline cplx cis_pi(double x) {
  const double r = std::remainder(x, 2.0);
  return {std::cos(std::numbers::pi * r), std::sin(std::numbers::pi * r)};
}

struct QuadResult {
  cplx value;
  double error = 0.0;
  std::size_t panels = 0;
};

struct QuadOptions {
  double tolerance = 1e-10;             // absolute
  double max_panel_width = INFINITY;    // initial panels are no wider than this
  std::size_t panel_cap = 400000;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx k = kWgk[7] * fc;
  cplx g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const cplx s = f(c - dx) + f(c + dx);
    k += kWgk[i] * s;
    if (i % 2 == 1) g += kWg[i / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

// Absolute-error adaptive integration of f over [a, b]. Panels are split at
// their midpoint, largest error first. The final sum runs over panels in
// left-to-right order, so the result is deterministic.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  if (!(b > a)) return {};
  const double span = b - a;
  std::size_t initial = 1;
  if (std::isfinite(opt.max_panel_width) && opt.max_panel_width > 0.0)
    initial = static_cast<std::size_t>(std::ceil(span / opt.max_panel_width));
  initial = std::max<std::size_t>(initial, 1);
  if (initial > opt.panel_cap) throw ResourceError("integrate: initial panel count exceeds the panel cap");

  std::priority_queue<detail::Panel> queue;
  double total_error = 0.0;
  for (std::size_t i = 0; i < initial; ++i) {
    const double lo = a + span * static_cast<double>(i) / static_cast<double>(initial);
    const double hi = i + 1 == initial ? b : a + span * static_cast<double>(i + 1) / static_cast<double>(initial);
    auto panel = detail::gk15(f, lo, hi);
    total_error += panel.error;
    queue.push(panel);
  }
  while (total_error > opt.tolerance && queue.size() < opt.panel_cap) {
    const detail::Panel worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    queue.pop();
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  std::vector<detail::Panel> panels;
  panels.reserve(queue.size());
  while (!queue.empty()) {
    panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  QuadResult out;
  out.panels = panels.size();
  for (const auto& p : panels) {
    out.value += p.value;
    out.error += p.error;
  }
  if (out.error > opt.tolerance)
    throw ConvergenceError("integrate: tolerance not reached within the panel cap", out.value, out.error);
  return out;
}

}  // namespace huplab
