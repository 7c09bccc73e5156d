#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "huplab/experiments.hpp"
#include "huplab/measures.hpp"
#include "huplab/operators.hpp"
#include "huplab/quadrature.hpp"
#include "huplab/ulam.hpp"
#include "oracles.hpp"

using namespace huplab;

TEST(TransferOperator, ConstantAtZeroIsZeta2Over2) {
  // P_1[1](0) = sum_{j != 0} 1/(4 j^2) = pi^2/12
  const MapParams m(1, 1.0);
  const auto v = pf_apply([](double) { return 1.0; }, 0.0, m, 100000, 1.0);
  const double expect = std::numbers::pi * std::numbers::pi / 12.0;
  EXPECT_LE(std::fabs(v.value.real() - expect), 1e-8 + v.tail_bound);
  EXPECT_LT(std::fabs(v.corrected().real() - expect), 1e-12);
}

TEST(TransferOperator, WeightTailBoundHolds) {
  oracle::Gen gen(31);
  for (int i = 0; i < 100; ++i) {
    const int p = gen.p();
    const MapParams m(p, gen.beta(p));
    const double x = gen.uniform(-p, p);
    const auto J = gen.integer(2, 200);
    const auto a = pf_apply([](double) { return 1.0; }, x, m, J, 1.0);
    const auto b = pf_apply([](double) { return 1.0; }, x, m, 200000, 1.0);
    ASSERT_LE(b.value.real() - a.value.real(), a.tail_bound);
    ASSERT_GE(b.value.real(), a.value.real());
  }
}

TEST(TransferOperator, OmegaIsFixedAtFullBranches) {
  for (int p : {1, 2, 3}) {
    const MapParams m(p, static_cast<double>(p));
    const std::int64_t J = 20000;
    const double sup_tail = omega_density(p / (2.0 * J + 1.0), p);
    auto rho = [p](double y) { return omega_density(y, p); };
    for (int i = 0; i <= 100; ++i) {
      const double x = -0.99 * p + 1.98 * p * i / 100.0;
      const auto v = pf_apply(rho, x, m, J, sup_tail);
      const double r = omega_density(x, p);
      ASSERT_LE(std::fabs(v.value.real() - r), v.tail_bound * (1.0 + 1e-9)) << x;
      ASSERT_LT(std::fabs(v.corrected().real() - r) / r, 1e-9) << x;
    }
  }
}

TEST(TransferOperator, DualToKoopman) {
  // <phi, P f> = <C phi, f>, with both sides restricted to branches |j| <= J.
  const std::int64_t J = 60;
  for (auto [p, beta] : {std::pair{1, 0.5}, std::pair{1, 1.0}, std::pair{2, 1.3}}) {
    const MapParams m(p, beta);
    auto phi = [p](double y) { return std::cos(1.3 * y / p) + 0.25 * y; };
    auto f = [p](double y) { return std::exp(-y * y / p) * (1.0 + 0.1 * y); };
    QuadOptions q;
    q.tolerance = 1e-11;
    const double lhs =
        integrate([&](double x) { return phi(x) * pf_apply(f, x, m, J, 1.2).value; }, -p, p, q).value.real();
    double rhs = 0.0;
    for (std::int64_t j = -J; j <= J; ++j) {
      if (j == 0) continue;
      const double jd = static_cast<double>(j);
      double lo = beta / (2.0 * jd + 1.0), hi = beta / (2.0 * jd - 1.0);  // (lo, hi] is branch j
      lo = std::max(lo, -beta);
      hi = std::min(hi, beta);
      // inside the branch gauss_u(x) = p(-beta/x + 2j), smooth
      rhs += integrate([&](double x) { return cplx(phi(p * (-beta / x + 2.0 * jd)) * f(x)); }, lo, hi, q)
                 .value.real();
    }
    EXPECT_NEAR(lhs, rhs, 1e-8) << p << ' ' << beta;
  }
}

TEST(TransferOperator, UlamContractionAndMassPreservation) {
  oracle::Gen gen(32);
  for (int i = 0; i < 20; ++i) {
    const int p = gen.p();
    const bool full = i % 2 == 0;
    const MapParams m(p, full ? static_cast<double>(p) : gen.beta(p));
    const auto n = static_cast<std::size_t>(gen.integer(2, 200));
    const auto u = ulam_assemble(n, m, 100);
    Eigen::VectorXd mass(static_cast<Eigen::Index>(n));
    for (auto& v : mass) v = gen.uniform(-1.0, 1.0);
    const Eigen::VectorXd image = u.entries * mass;
    ASSERT_LE(image.lpNorm<1>(), mass.lpNorm<1>() * (1.0 + 1e-9));
    if (full) {
      const Eigen::VectorXd pos = mass.cwiseAbs();
      ASSERT_NEAR((u.entries * pos).sum(), pos.sum(), 1e-12 * pos.sum());
    }
  }
}

TEST(Koopman, EndpointsAreAmbiguous) {
  const MapParams m(1, 1.0);
  auto phi = [](double y) { return y; };
  EXPECT_THROW(koopman_apply(phi, 1.0 / 3.0, m), AmbiguityError);
  EXPECT_THROW(ts_apply(phi, 1.0 / 3.0, m), AmbiguityError);
  EXPECT_EQ(koopman_apply(phi, 0.0, m), cplx(0.0));
  EXPECT_EQ(koopman_apply(phi, 0.9, MapParams(1, 0.5)), cplx(0.0));
  EXPECT_THROW(koopman_apply(phi, 1.5, m), DomainError);
}

TEST(Koopman, TsEqualsKoopmanSquared) {
  oracle::Gen gen(33);
  for (int i = 0; i < 40; ++i) {
    const int p = gen.p();
    const MapParams m(p, gen.beta(p));
    const auto pts = random_safe_points(gen.engine(), m, 2000);
    const auto phi = PiecewiseLinear::random(gen.engine(), p, 6);
    ASSERT_LT(ts_koopman_residual(phi, pts, m), 1e-12);
    ASSERT_LT(factorization_residual(phi, pts, m), 1e-12);
  }
}

TEST(Koopman, TsIsCompositionOfTAndS) {
  oracle::Gen gen(34);
  for (int i = 0; i < 20; ++i) {
    const int p = gen.p();
    const MapParams m(p, gen.beta(p));
    auto phi = [](double y) { return cplx(std::sin(3.0 * y), y); };
    for (double x : random_safe_points(gen.engine(), m, 500)) {
      const cplx a = ts_apply(phi, x, m);
      const cplx b = t_beta_apply([&](double y) { return s_apply(phi, y, p); }, x, m.beta());
      // both sides jump where beta/(p s) is an odd integer; compare away from that set
      if (!m.in_window(x) || x == 0.0) continue;
      const double q = m.beta() / (p * mod2(m.beta() / x));
      if (std::fabs(mod2(q)) > 1.0 - 1e-9) continue;
      ASSERT_LT(std::abs(a - b), 1e-9) << x;
    }
  }
}

TEST(Koopman, SAndTSupports) {
  auto phi = [](double y) { return 1.0 + y; };
  EXPECT_EQ(s_apply(phi, 0.5, 1), cplx(0.0));
  EXPECT_EQ(s_apply(phi, 2.5, 1), cplx(1.5));
  EXPECT_EQ(t_beta_apply(phi, 0.7, 0.5), cplx(0.0));
  EXPECT_THROW(t_beta_apply(phi, 0.0, 0.5), DomainError);
  EXPECT_FALSE(in_e_beta(0.0, MapParams(1, 1.0)));
}

TEST(GridFunctions, HalfOpenBins) {
  const MapParams m(1, 1.0);
  GridFunction g(m, std::vector<cplx>{1.0, 2.0});
  EXPECT_EQ(g(0.0), cplx(1.0));
  EXPECT_EQ(g(1e-12), cplx(2.0));
  EXPECT_EQ(g(1.0), cplx(2.0));
  EXPECT_EQ(g(-1.0), cplx(0.0));
  GridDensity d(m, std::vector<cplx>{1.0, -3.0}, cplx(0.5));
  EXPECT_DOUBLE_EQ(d.l1_norm(), 4.0);
  EXPECT_DOUBLE_EQ(d.total_variation(), 4.5);
  for (double x : g.sample_points()) EXPECT_FALSE(near_branch_endpoint(x, m, 1e-9));
}

TEST(OperatorExamples, WorkedValues) {
  const auto half = pf_apply([](double) { return 1.0; }, 0.0, MapParams(1, 0.5), 100000, 1.0);
  EXPECT_NEAR(half.corrected().real(), std::numbers::pi * std::numbers::pi / 24.0, 1e-12);
  EXPECT_EQ(koopman_apply([](double t) { return t; }, 0.5, MapParams(1, 1.0)), cplx(0.0));
  EXPECT_EQ(koopman_apply([](double) { return 1.0; }, -0.3, MapParams(1, 0.5)), cplx(1.0));
  EXPECT_EQ(s_apply([](double t) { return t; }, 2.5, 1), cplx(0.5));
  EXPECT_DOUBLE_EQ(t_beta_apply([](double t) { return t; }, 0.4, 1.0).real(), 2.0);
  EXPECT_EQ(t_beta_apply([](double t) { return t; }, 0.9, 0.5), cplx(0.0));
  // phi = 1: T S[1] is the indicator of E_beta
  const MapParams m(2, 1.5);
  oracle::Gen gen(35);
  for (double x : random_safe_points(gen.engine(), m, 2000))
    ASSERT_EQ(ts_apply([](double) { return 1.0; }, x, m), cplx(in_e_beta(x, m) ? 1.0 : 0.0));
  auto wave = [](double t) { return std::polar(1.0, std::numbers::pi * t / 2.0); };
  EXPECT_LT(factorization_residual(wave, random_safe_points(gen.engine(), m, 2000), m), 1e-12);
}
