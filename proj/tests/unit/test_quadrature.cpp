#include <ccsa/problem.hpp>
#include <ccsa/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ccsa;

TEST(Quadrature, PiecewiseStepIsExactWithBreakpoints)
{
  auto step = [](double x) { return x < 0.3 ? 1.0 : 4.0; };
  EXPECT_NEAR(integrate_piecewise(step, 0.0, 1.0, {0.3}), 0.3 + 4.0 * 0.7, 1e-14);
  // out-of-range and duplicate breakpoints are harmless
  EXPECT_NEAR(integrate_piecewise(step, 0.0, 1.0, {0.3, 0.3, -2.0, 5.0}), 3.1, 1e-14);
}

TEST(Quadrature, SmoothIntegrals)
{
  EXPECT_NEAR(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi),
              2.0, 1e-13);
  EXPECT_NEAR(gauss_legendre([](double x) { return x * x * x * x; }, -1.0, 1.0, 1), 0.4, 1e-15);
  EXPECT_EQ(integrate_adaptive([](double) { return 1.0; }, 1.0, 1.0), 0.0);
}

TEST(Quadrature, RootsOfSine)
{
  const auto roots = find_roots([](double x) { return std::sin(x); }, 0.5, 10.0, 100);
  ASSERT_EQ(roots.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(roots[i], std::numbers::pi * static_cast<double>(i + 1), 1e-14);
}

TEST(Quadrature, NoiseExpectations)
{
  for (const auto& noise : {NoiseModel::quintic(0.4, 3.0), NoiseModel::gaussian(-2.0, 0.1)}) {
    EXPECT_NEAR(noise_expectation(noise, [](double) { return 1.0; }, {}), 1.0, 1e-12);
    EXPECT_NEAR(noise_expectation(noise, [](double x) { return x; }, {}), noise.center, 1e-12);
  }
  // quintic variance: sigma^2 / 7
  const auto q = NoiseModel::quintic(0.4, 3.0);
  EXPECT_NEAR(noise_expectation(q, [](double x) { return (x - 0.4) * (x - 0.4); }, {}), 9.0 / 7.0,
              1e-12);
}

TEST(Quadrature, PortfolioCrossings)
{
  const auto p = make_portfolio_problem();
  const Vector u{{0.1, 0.5}};
  for (double offset : {-0.2, 0.0, 0.2}) {
    const auto roots = constraint_crossings(p, u, offset);
    ASSERT_EQ(roots.size(), 1u);
    EXPECT_NEAR(roots[0], (1.15 - 1.2 * 0.1 - offset) / 0.5 - 1.0, 1e-12);
  }
}
