#include <gtest/gtest.h>

#include <cmath>

#include "huplab/spectrum.hpp"
#include "huplab/ulam.hpp"

using namespace huplab;

TEST(Spectrum, TwoBinEigenvalues) {
  const auto r = spectral_top(ulam_assemble(2, MapParams(1, 1.0), 200), 2);
  ASSERT_EQ(r.eigenvalues.size(), 2u);
  EXPECT_NEAR(r.eigenvalues[0].real(), 1.0, 1e-12);
  EXPECT_NEAR(r.eigenvalues[1].real(), 2.0 * std::log(2.0) - 1.0, 1e-12);
  EXPECT_NEAR(r.leading_vector[0], 0.5, 1e-12);
  EXPECT_NEAR(r.leading_vector.sum(), 1.0, 1e-15);
  EXPECT_EQ(r.method, SpectrumMethod::dense);
}

TEST(Spectrum, DenseAndIterativeAgree) {
  const auto u = ulam_assemble(400, MapParams(1, 0.5), 200);
  const auto d = spectral_top_dense(u.dense(), 3);
  SpectrumOptions opt;
  const auto it = spectral_top_iterative(u.entries, 3, opt);
  EXPECT_EQ(it.method, SpectrumMethod::power_iteration);
  EXPECT_NEAR(d.spectral_radius, it.spectral_radius, 1e-10);
  EXPECT_NEAR(std::abs(d.eigenvalues[1]), std::abs(it.eigenvalues[1]), 1e-8);
  EXPECT_LT((d.leading_vector - it.leading_vector).lpNorm<1>(), 1e-8);
}

TEST(Spectrum, LeadingVectorIsAProbabilityVector) {
  for (double beta : {0.3, 1.0, 2.0}) {
    const auto r = spectral_top(ulam_assemble(128, MapParams(2, beta), 100), 1);
    EXPECT_GE(r.leading_vector.minCoeff(), 0.0);
    EXPECT_NEAR(r.leading_vector.sum(), 1.0, 1e-12);
    EXPECT_LE(r.spectral_radius, 1.0 + 1e-9);
  }
}

TEST(Spectrum, RadiusGrowsWithWindow) {
  double last = 0.0;
  for (double beta : {0.25, 0.5, 0.75, 1.0}) {
    const double r = spectral_top(ulam_assemble(200, MapParams(1, beta), 200), 1).spectral_radius;
    EXPECT_GT(r, last);
    last = r;
  }
  EXPECT_NEAR(last, 1.0, 1e-9);
}

TEST(Spectrum, EdgeMassFraction) {
  const BinGrid g(1, 20);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(20);
  v[0] = 1.0;
  v[10] = 1.0;
  // the outer 5% of (-1, 1] is half of the first and half of the last bin
  EXPECT_DOUBLE_EQ(edge_mass_fraction(v, g), 0.25);
  v.setConstant(1.0);
  EXPECT_NEAR(edge_mass_fraction(v, g), 0.05, 1e-15);
}

TEST(Spectrum, RejectsZeroCount) {
  EXPECT_THROW(spectral_top(ulam_assemble(4, MapParams(1, 1.0), 10), 0), ParameterError);
}

TEST(Spectrum, IdentityMatrix) {
  const auto r = spectral_top_dense(Eigen::MatrixXd::Identity(5, 5), 2);
  EXPECT_NEAR(r.spectral_radius, 1.0, 1e-15);
  EXPECT_NEAR(std::abs(r.eigenvalues[1]), 1.0, 1e-15);
}
