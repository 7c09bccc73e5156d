#include <gtest/gtest.h>

#include <cmath>

#include "huplab/escape.hpp"
#include "oracles.hpp"

using namespace huplab;

TEST(Escape, FirstStepIsTheWindow) {
  for (auto [p, beta] : {std::pair{1, 0.5}, std::pair{3, 1.25}}) {
    const auto e = escape_profile(1, MapParams(p, beta));
    EXPECT_EQ(e[0].measure, 2.0 * beta);
    EXPECT_EQ(e[0].error_bound, 0.0);
  }
}

TEST(Escape, SecondStepClosedForm) {
  for (auto [p, beta] : {std::pair{1, 0.5}, std::pair{2, 0.3}, std::pair{3, 2.5}}) {
    const auto e = escape_profile(2, MapParams(p, beta));
    EXPECT_NEAR(e[1].measure, oracle::escape_two(p, beta), e[1].error_bound + 1e-12);
    EXPECT_LT(e[1].error_bound, 1e-6);
  }
}

TEST(Escape, MatchesGridCount) {
  const auto e = escape_profile(6, MapParams(1, 0.5));
  for (int n = 1; n <= 6; ++n)
    EXPECT_NEAR(e[n - 1].measure, oracle::escape_grid(1, 0.5, n, 4'000'000), 1e-4 + e[n - 1].error_bound) << n;
}

TEST(Escape, NonincreasingWithHonestBounds) {
  oracle::Gen gen(51);
  for (int i = 0; i < 8; ++i) {
    const int p = static_cast<int>(gen.integer(1, 3));
    const MapParams m(p, gen.uniform(0.2, 0.7) * p);
    const auto e = escape_profile(10, m);
    for (std::size_t n = 1; n < e.size(); ++n) ASSERT_LE(e[n].measure, e[n - 1].measure);
    for (const auto& v : e) ASSERT_GE(v.error_bound, 0.0);
  }
}

TEST(Escape, FullWindowHasNoHole) {
  const auto e = escape_profile(5, MapParams(2, 2.0));
  for (const auto& v : e) EXPECT_EQ(v.measure, 4.0);
}

TEST(Escape, MonteCarloIsSeededAndAgrees) {
  EscapeOptions opt;
  opt.method = EscapeMethod::monte_carlo;
  opt.samples = 200000;
  const MapParams m(1, 0.5);
  const auto a = escape_profile(6, m, opt), b = escape_profile(6, m, opt);
  const auto ex = escape_profile(6, m);
  for (std::size_t n = 0; n < 6; ++n) {
    ASSERT_EQ(a[n].measure, b[n].measure);
    ASSERT_LE(std::fabs(a[n].measure - ex[n].measure), 4.0 * a[n].error_bound + ex[n].error_bound + 1e-12);
  }
}

TEST(Escape, NodeCapRaisesResourceError) {
  EscapeOptions opt;
  opt.node_cap = 1000;
  EXPECT_THROW(escape_profile(12, MapParams(1, 0.5), opt), ResourceError);
  EXPECT_THROW(escape_profile(0, MapParams(1, 0.5)), ParameterError);
}
