#pragma once

// Closed forms for the tails of the branch sums. Every tail that shows up in
// the transfer operator is a sum over j of rational functions of j; these
// reduce to differences of digamma values and to trigamma values.

#include <cmath>

namespace huplab::detail {

// Asymptotic series is used once the argument reaches this value.
inline constexpr double kAsymptoticFrom = 32.0;

// psi(y2) - psi(y1) for y1, y2 >= kAsymptoticFrom, written so that the
// result keeps its relative accuracy when y2 - y1 is small.
inline double digamma_diff_asymptotic(double y1, double y2) {
  const double d = y2 - y1;
  double s = std::log1p(d / y1);
  s += d / (2.0 * y1 * y2);
  // - sum_k B_2k / (2k y^2k), differenced term by term.
  const double i1 = 1.0 / (y1 * y1), i2 = 1.0 / (y2 * y2);
  const double p1[] = {i1, i1 * i1, i1 * i1 * i1, i1 * i1 * i1 * i1, i1 * i1 * i1 * i1 * i1};
  const double p2[] = {i2, i2 * i2, i2 * i2 * i2, i2 * i2 * i2 * i2, i2 * i2 * i2 * i2 * i2};
  const double c[] = {1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0};
  for (int k = 0; k < 5; ++k) s -= c[k] * (p2[k] - p1[k]);
  return s;
}

// sum_{i >= 0} [ 1/(x + i + c1) - 1/(x + i + c2) ]  =  psi(x + c2) - psi(x + c1)
// Requires x + c1 > 0 and x + c2 > 0.
inline double harmonic_tail_diff(double x, double c1, double c2) {
  double acc = 0.0;
  double y1 = x + c1, y2 = x + c2;
  while (y1 < kAsymptoticFrom || y2 < kAsymptoticFrom) {
    acc += 1.0 / y1 - 1.0 / y2;
    y1 += 1.0;
    y2 += 1.0;
  }
  return acc + digamma_diff_asymptotic(y1, y2);
}

// sum_{i = first}^{last} [ 1/(i + c1) - 1/(i + c2) ] for integers first <= last.
inline double harmonic_range_diff(double first, double last, double c1, double c2) {
  if (last - first < 64.0) {
    double acc = 0.0;
    for (double i = first; i <= last; i += 1.0) acc += 1.0 / (i + c1) - 1.0 / (i + c2);
    return acc;
  }
  return harmonic_tail_diff(first, c1, c2) - harmonic_tail_diff(last + 1.0, c1, c2);
}

// Trigamma psi'(y) = sum_{i >= 0} 1/(y + i)^2 for y > 0.
inline double trigamma(double y) {
  double acc = 0.0;
  while (y < kAsymptoticFrom) {
    acc += 1.0 / (y * y);
    y += 1.0;
  }
  const double iy = 1.0 / y, iy2 = iy * iy;
  // 1/y + 1/(2y^2) + sum_k B_2k / y^(2k+1)
  double s = iy + 0.5 * iy2;
  double pw = iy2 * iy;
  const double b[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
  for (double bk : b) {
    s += bk * pw;
    pw *= iy2;
  }
  return acc + s;
}

}  // namespace huplab::detail
