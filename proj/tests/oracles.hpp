#pragma once

// Reference values computed independently of the library: plain loops in
// long double, closed forms, and brute-force sampling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  std::int64_t integer(std::int64_t a, std::int64_t b) {
    return std::uniform_int_distribution<std::int64_t>(a, b)(rng_);
  }
  int p() { return static_cast<int>(integer(1, 5)); }
  // beta in (0, p], biased towards both ends.
  double beta(int p) {
    const double u = uniform(0.0, 1.0);
    return p * std::clamp(u * u * (3.0 - 2.0 * u), 1e-3, 1.0);
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// {u}_2 in (-1, 1] via floor: u - 2 * ceil((u - 1) / 2).
inline double mod2(double u) { return u - 2.0 * std::ceil((u - 1.0) / 2.0); }

// U_beta(x) = p {-beta/x}_2, U(0) = 0.
inline double gauss_u(double x, int p, double beta) { return x == 0.0 ? 0.0 : p * mod2(-beta / x); }

// Sum over 0 < |j| <= J of 1/((2pj - t)^2 - p^2), summed j = 1..J in long double.
inline long double partial_fraction(double t, int p, std::int64_t J) {
  long double s = 0.0L;
  for (std::int64_t j = 1; j <= J; ++j)
    for (int sign : {1, -1}) {
      const long double a = 2.0L * p * sign * j - t;
      s += 1.0L / (a * a - static_cast<long double>(p) * p);
    }
  return s;
}

// sum_{j >= 1} 1/(j^2 - a^2) = (1 - pi a cot(pi a)) / (2 a^2)
inline double sum_inv_j2_minus_a2(double a) {
  return (1.0 - pi * a / std::tan(pi * a)) / (2.0 * a * a);
}

// |E_beta(2)| = sum_j |h_j(-beta, beta]| = 2p (1 - pi a cot(pi a)), a = beta/(2p), for beta < p.
inline double escape_two(int p, double beta) {
  const double a = beta / (2.0 * p);
  return 2.0 * p * (1.0 - pi * a / std::tan(pi * a));
}

// |E_beta(n)| by counting survivors on a uniform midpoint grid of M points.
inline double escape_grid(int p, double beta, int n, std::int64_t M) {
  std::int64_t alive = 0;
  for (std::int64_t i = 0; i < M; ++i) {
    double x = -p + (static_cast<double>(i) + 0.5) * 2.0 * p / static_cast<double>(M);
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      ok = x > -beta && x <= beta;
      x = gauss_u(x, p, beta);
    }
    alive += ok;
  }
  return 2.0 * p * static_cast<double>(alive) / static_cast<double>(M);
}

// Ulam matrix by sampling M midpoints per source bin.
inline std::vector<std::vector<double>> ulam_sampled(int p, double beta, int n, int M) {
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  const double w = 2.0 * p / n;
  for (int l = 0; l < n; ++l)
    for (int s = 0; s < M; ++s) {
      const double x = -p + w * (l + (s + 0.5) / M);
      if (!(x > -beta && x <= beta)) continue;
      const double y = gauss_u(x, p, beta);
      int k = static_cast<int>(std::ceil((y + p) / w)) - 1;
      k = std::clamp(k, 0, n - 1);
      out[k][l] += 1.0 / M;
    }
  return out;
}

// Fourier transform of a single atom w at (t, 1/t).
inline std::complex<double> atom_ft(double t, std::complex<double> w, double xi, double eta) {
  const double ph = pi * (xi * t + eta / t);
  return w * std::complex<double>(std::cos(ph), std::sin(ph));
}

// Gaussian g(t) = e^{-t^2}: mu^(xi, 0) = sqrt(pi) e^{-pi^2 xi^2 / 4}.
inline double gaussian_ft_horizontal(double xi) { return std::sqrt(pi) * std::exp(-pi * pi * xi * xi / 4.0); }

// mu^(0, eta) = int e^{-t^2} e^{i pi eta / t} dt, from a 30-digit mpmath quadrature.
struct GaussianVertical {
  double eta, value;
};
inline const std::vector<GaussianVertical>& gaussian_ft_vertical() {
  static const std::vector<GaussianVertical> v{{0.1, 0.945113103158976496722812891818},
                                               {0.5, -0.326540948142264433019736747251},
                                               {1.0, -0.249885448197367706492517962688},
                                               {3.0, 0.0159276404060609098078534101085}};
  return v;
}

// Closed forms of the harmonic extensions, written from the boundary data.
inline std::complex<double> ext_ep(std::int64_t n, int p, std::complex<double> z) {
  const double k = pi * (static_cast<double>(n) + 1.0 / p);
  // e^{i k x} extends as e^{i k z} when k > 0 and e^{i k conj(z)} when k < 0
  const double x = z.real(), y = z.imag();
  return std::polar(std::exp(-std::fabs(k) * y), k * x);
}

inline std::complex<double> ext_ebeta(std::int64_t n, double beta, std::complex<double> z) {
  // e^{i c / t}: with 1/conj(z) = z/|z|^2, Im(1/conj z) = y/|z|^2 > 0
  const double c = pi * static_cast<double>(n) * beta;
  const double r2 = std::norm(z);
  const double x = z.real(), y = z.imag();
  return std::polar(std::exp(-std::fabs(c) * y / r2), c * x / r2);
}

}  // namespace oracle
