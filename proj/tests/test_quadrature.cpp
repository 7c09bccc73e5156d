#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "huplab/quadrature.hpp"

using namespace huplab;

TEST(Quadrature, Polynomials) {
  const auto r = integrate([](double x) { return cplx(x * x * x - 2.0 * x, 1.0); }, -1.0, 3.0);
  EXPECT_NEAR(r.value.real(), 20.0 - 8.0, 1e-12);
  EXPECT_NEAR(r.value.imag(), 4.0, 1e-12);
}

TEST(Quadrature, Oscillatory) {
  QuadOptions q;
  q.tolerance = 1e-12;
  q.max_panel_width = 0.5;
  const double w = 40.0;
  const auto r = integrate([w](double x) { return cis_pi(w * x); }, 0.0, 1.3, q);
  const cplx expect = (cis_pi(w * 1.3) - 1.0) / cplx(0.0, std::numbers::pi * w);
  EXPECT_LT(std::abs(r.value - expect), 1e-12);
}

TEST(Quadrature, EmptyIntervalAndFailure) {
  EXPECT_EQ(integrate([](double) { return cplx(1.0); }, 1.0, 1.0).value, cplx(0.0));
  QuadOptions q;
  q.panel_cap = 20;
  q.tolerance = 1e-14;
  EXPECT_THROW(integrate([](double x) { return cplx(1.0 / std::sqrt(x)); }, 0.0, 1.0, q), ConvergenceError);
  q.max_panel_width = 1e-3;
  EXPECT_THROW(integrate([](double) { return cplx(1.0); }, 0.0, 1.0, q), ResourceError);
}

TEST(Quadrature, CisPiReducesArgument) {
  EXPECT_EQ(cis_pi(2.0), cplx(1.0, 0.0));
  EXPECT_NEAR(std::abs(cis_pi(1e15 + 0.5) - cplx(0.0, 1.0)), 0.0, 1e-12);
  for (double x : {0.3, 1.7, -5.25, 1e9 + 0.125}) EXPECT_EQ(cis_pi(-x), std::conj(cis_pi(x)));
}
