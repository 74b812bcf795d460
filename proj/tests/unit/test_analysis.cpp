#include "oracles.hpp"

#include <ccsa/analysis.hpp>
#include <ccsa/error.hpp>
#include <ccsa/harness.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace ccsa;

namespace {

const Vector kOpt{{0.0, 0.50407}};

struct Moments
{
  double mean[2];
  double var[2];
};

// AC estimate -(h(theta/r)/r) theta' with theta = 1.15 - 1.2u - (1+xi)v,
// integrated against the quintic density between the kernel edges.
Moments ac_oracle(double u, double v, double r)
{
  const double a = (1.15 - 1.2 * u - r) / v - 1.0;
  const double b = (1.15 - 1.2 * u + r) / v - 1.0;
  const double c = (1.15 - 1.2 * u) / v - 1.0;
  auto theta = [=](double xi) { return 1.15 - 1.2 * u - (1.0 + xi) * v; };
  auto gu = [=](double xi) { return 1.2 / r * oracle::parabolic(theta(xi) / r); };
  auto gv = [=](double xi) { return (1.0 + xi) / r * oracle::parabolic(theta(xi) / r); };
  auto E = [&](auto f) {
    return oracle::simpson_pieces([&](double x) { return f(x) * oracle::quintic_pdf(x); },
                                  {a, c, b}, 4000);
  };
  Moments m{};
  m.mean[0] = E(gu);
  m.mean[1] = E(gv);
  m.var[0] = E([&](double x) { return gu(x) * gu(x); }) - m.mean[0] * m.mean[0];
  m.var[1] = E([&](double x) { return gv(x) * gv(x); }) - m.mean[1] * m.mean[1];
  return m;
}

// FD estimate: each component is +-1/(2c) on an interval of xi, so the
// moments are probability masses of those intervals.
Moments fd_oracle(double u, double v, double c)
{
  auto mass = [](double lo, double hi) {
    lo = std::max(lo, -2.6);
    hi = std::min(hi, 3.4);
    return lo < hi ? oracle::simpson(oracle::quintic_pdf, lo, hi, 4000) : 0.0;
  };
  auto s = [](double uu, double vv) { return (1.15 - 1.2 * uu) / vv - 1.0; };
  // satisfied iff xi >= s(u, v); u+c lowers s, so the u-difference is
  // 1/(2c) on [s(u+c), s(u-c)).
  const double pu = mass(s(u + c, v), s(u - c, v));
  const double pv = mass(s(u, v + c), s(u, v - c));
  const double k = 1.0 / (2.0 * c);
  Moments m{};
  m.mean[0] = k * pu;
  m.mean[1] = k * pv;
  m.var[0] = k * k * pu - m.mean[0] * m.mean[0];
  m.var[1] = k * k * pv - m.mean[1] * m.mean[1];
  return m;
}

} // namespace

TEST(BiasVariance, AcMatchesIndependentQuadrature)
{
  const auto p = make_portfolio_problem();
  for (double r : {0.05, 0.1, 0.25, 0.5, 1.0}) {
    const auto rep = bias_variance_oracle(p, EstimatorConfig::ac(r), kOpt, r);
    const auto ref = ac_oracle(0.0, 0.50407, r);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(rep.mean[j], ref.mean[j], 1e-9) << r;
      EXPECT_NEAR(rep.variance[j], ref.var[j], 1e-8 * std::max(1.0, ref.var[j])) << r;
    }
  }
}

TEST(BiasVariance, FdMatchesIndependentQuadrature)
{
  const auto p = make_portfolio_problem();
  for (double c : {0.05, 0.1, 0.25, 0.5}) {
    const auto rep = bias_variance_oracle(p, EstimatorConfig::fd(c), kOpt, c);
    const auto ref = fd_oracle(0.0, 0.50407, c);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(rep.mean[j], ref.mean[j], 1e-9) << c;
      EXPECT_NEAR(rep.variance[j], ref.var[j], 1e-8 * std::max(1.0, ref.var[j])) << c;
    }
  }
}

TEST(BiasVariance, PinnedMomentsAtOptimum)
{
  const auto p = make_portfolio_problem();
  const auto ac = bias_variance_oracle(p, EstimatorConfig::ac(0.5), kOpt, 0.5);
  EXPECT_NEAR(ac.mean[0], 0.597702, 1e-6);
  EXPECT_NEAR(ac.variance[0], 0.512880, 1e-5);
  // leading terms 0.62 - 0.096 r^2 + 0.012 r^4
  EXPECT_NEAR(ac.mean[0], 0.62 - 0.096 * 0.25 + 0.012 * 0.0625, 1e-3);
  const auto fd = bias_variance_oracle(p, EstimatorConfig::fd(0.5), kOpt, 0.5);
  EXPECT_NEAR(fd.variance[0], 0.245530, 1e-5);
}

TEST(BiasVariance, VarianceScalesInverselyWithSmoothing)
{
  const auto p = make_portfolio_problem();
  const auto a = bias_variance_oracle(p, EstimatorConfig::ac(0.05), kOpt, 0.05);
  const auto b = bias_variance_oracle(p, EstimatorConfig::ac(0.1), kOpt, 0.1);
  EXPECT_NEAR(a.variance[0] * 0.05 / (b.variance[0] * 0.1), 1.0, 0.1);
}

TEST(BiasVariance, MqeDefinition)
{
  const auto p = make_portfolio_problem();
  const auto rep = bias_variance_oracle(p, EstimatorConfig::ac(0.3), kOpt, 0.3, 25.0);
  EXPECT_DOUBLE_EQ(rep.mqe, rep.variance.sum() / 25.0 + rep.bias.squaredNorm());
  EXPECT_EQ(rep.bias, rep.mean - analytic_probability_gradient(p, kOpt));
}

TEST(BiasVariance, Errors)
{
  const auto p = make_portfolio_problem();
  EXPECT_THROW(bias_variance_oracle(p, EstimatorConfig::ac(0.3), Vector{{0.3, 0.0}}, 0.3),
               OracleUnavailable);
  EXPECT_THROW(bias_variance_oracle(p, EstimatorConfig::exact(), kOpt, 0.3), ValidationError);
  EXPECT_THROW(bias_variance_oracle(p, EstimatorConfig::ac(0.3), kOpt, 0.0), ValidationError);
}

TEST(Indicator, UnbiasedAtInteriorPoints)
{
  const auto p = make_portfolio_problem();
  for (auto [u, v] : {std::pair{0.1, 0.5}, {0.3, 0.6}, {0.0, 0.9}, {0.5, 0.2}, {0.2, 0.3}})
    EXPECT_NEAR(indicator_mean(p, Vector{{u, v}}), analytic_probability(p, Vector{{u, v}}), 1e-8);
}

TEST(Mqe, OptimalSmoothingFormula)
{
  const auto s = optimal_smoothing(4.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(s.smoothing, 1.0);
  const double A = 2.0;
  const double B = 0.4;
  const double N = 100.0;
  const auto o = optimal_smoothing(A, B, N);
  auto mqe = [&](double r) { return A / (r * N) + B * B * std::pow(r, 4); };
  EXPECT_NEAR(o.mqe, mqe(o.smoothing), 1e-12);
  EXPECT_LT(mqe(o.smoothing), mqe(o.smoothing * 1.01));
  EXPECT_LT(mqe(o.smoothing), mqe(o.smoothing * 0.99));
  EXPECT_THROW(optimal_smoothing(0.0, 1.0, 1.0), ValidationError);
  EXPECT_THROW(optimal_smoothing(1.0, -1.0, 1.0), ValidationError);
}

TEST(Mqe, PortfolioFits)
{
  const auto p = make_portfolio_problem();
  const auto ac = fit_mqe_constants(p, EstimatorConfig::ac(1.0), kOpt);
  EXPECT_NEAR(optimal_smoothing(ac.A, ac.B, 1.0).smoothing, 1.30, 0.05);
  EXPECT_NEAR(mqe_coefficient(ac.A, ac.B), 1.98, 0.1);
  EXPECT_NEAR(ac.variance_constants[0], 0.45, 0.01);
  EXPECT_NEAR(ac.variance_constants[1], 1.62, 0.01);
  const auto fd = fit_mqe_constants(p, EstimatorConfig::fd(1.0), kOpt);
  EXPECT_NEAR(optimal_smoothing(fd.A, fd.B, 1.0).smoothing, 0.63, 0.05);
  EXPECT_NEAR(mqe_coefficient(fd.A, fd.B), 1.79, 0.1);
  EXPECT_NEAR(fd.variance_constants[0], 0.31, 0.01);
  EXPECT_NEAR(fd.variance_constants[1], 0.59, 0.01);
}

TEST(MeanField, ToyExamples)
{
  const auto toy = make_toy_problem(0.7);
  const auto s = solve_toy_deterministic(0.7);
  EXPECT_LE(mean_field(toy, Vector{{s.u}}, Vector{{s.lambda}}).norm(), 1e-6);
  for (double l : {0.0, 1.0, 1e3, 1e6}) {
    const Vector f = mean_field(toy, Vector{{1.0}}, Vector{{l}});
    EXPECT_LT(std::abs(f[0]), 1e-100);
    EXPECT_NEAR(f[1], 0.7 - analytic_probability(toy, Vector{{1.0}}), 1e-15);
    EXPECT_GT(f[1], 0.0);
  }
}

TEST(MeanField, VanishesAtPortfolioEquilibriumInteriorCoordinates)
{
  const auto p = make_portfolio_problem();
  const auto x = reference_solution(p);
  const Vector f = mean_field(p, x.u, x.lambda);
  // u sits on its lower bound, where the drift points outward.
  EXPECT_LT(f[0], 0.0);
  EXPECT_LE(std::abs(f[1]), 1e-6);
  EXPECT_LE(std::abs(f[3]), 1e-6);
}

TEST(Ode, ToyConvergesAndStalls)
{
  const auto toy = make_toy_problem(0.7);
  const auto s = solve_toy_deterministic(0.7);
  const auto good = ode_integrate(toy, {Vector{{-2.5}}, Vector{{1.0}}, 0}, 200.0, 0.01, 100);
  EXPECT_NEAR(good.terminal()[0], s.u, 1e-3);
  EXPECT_NEAR(good.terminal()[1], s.lambda, 1e-3);

  const auto bad = ode_integrate(toy, {Vector{{1.0}}, Vector{{1.0}}, 0}, 200.0, 0.01, 100);
  for (const auto& x : bad.states)
    EXPECT_LT(std::abs(x[0] - 1.0), 1e-6);
  EXPECT_GT(bad.terminal()[1], 100.0);

  const auto none = ode_integrate(toy, {Vector{{0.3}}, Vector{{2.0}}, 0}, 0.0, 0.01);
  ASSERT_EQ(none.states.size(), 1u);
  EXPECT_EQ(none.terminal(), (Vector{{0.3, 2.0}}));
  EXPECT_THROW(ode_integrate(toy, {Vector{{0.3}}, Vector{{2.0}}, 0}, 1.0, 0.0), ValidationError);
}

TEST(Linearize, PortfolioSpectra)
{
  const auto p = make_portfolio_problem();
  const auto x = reference_solution(p);
  const auto full = linearize(p, x.u, x.lambda, {0, 1, 3});
  const Eigen::Matrix3d expected{{0.944, 1.002, -0.621}, {1.002, 1.211, -1.181},
                                 {0.621, 1.181, 0.0}};
  EXPECT_LT((full.matrix - expected).cwiseAbs().maxCoeff(), 2e-3);
  ASSERT_EQ(full.eigenvalues.size(), 3u);
  EXPECT_NEAR(full.eigenvalues[0].real(), 0.207, 0.01);
  EXPECT_NEAR(full.eigenvalues[0].imag(), 0.0, 1e-9);
  EXPECT_NEAR(full.eigenvalues[1].real(), 0.974, 0.01);
  EXPECT_NEAR(std::abs(full.eigenvalues[1].imag()), 0.753, 0.01);
  EXPECT_TRUE(full.stable_gamma_below_one);
  EXPECT_FALSE(full.stable_gamma_one);
  EXPECT_DOUBLE_EQ(full.threshold, 0.4);

  const auto reduced = linearize(p, x.u, x.lambda, {1, 3});
  ASSERT_EQ(reduced.eigenvalues.size(), 2u);
  for (const auto& z : reduced.eigenvalues) {
    EXPECT_NEAR(z.real(), 0.605, 0.01);
    EXPECT_NEAR(std::abs(z.imag()), 1.014, 0.01);
  }
  EXPECT_TRUE(reduced.stable_gamma_one);
}

TEST(Linearize, UnconstrainedBlockIsHessian)
{
  const auto toy = make_toy_problem(0.7);
  const auto r = linearize(toy, Vector{{0.5}}, Vector{{0.0}}, {0});
  ASSERT_EQ(r.eigenvalues.size(), 1u);
  EXPECT_NEAR(r.eigenvalues[0].real(), 1.0, 1e-8);
  EXPECT_EQ(r.eigenvalues[0].imag(), 0.0);
  EXPECT_THROW(linearize(toy, Vector{{0.5}}, Vector{{0.0}}, {5}), ValidationError);
}

TEST(Clt, ErrorsAndDegenerateInput)
{
  Trajectory t;
  for (std::int64_t k = 0; k <= 5000; k += 100)
    t.records.push_back({Vector{{1.0}}, Vector{{2.0}}, k});
  t.terminal = t.records.back();
  EXPECT_THROW(clt_diagnostics(std::vector<Trajectory>(29, t), Vector{{0.0, 0.0}}, 0.8),
               ValidationError);
  const auto s = clt_diagnostics(std::vector<Trajectory>(30, t), Vector{{0.0, 0.0}}, 0.8);
  ASSERT_EQ(s.checkpoints.size(), 3u);
  for (const auto& c : s.checkpoints)
    EXPECT_LT(c.covariance.cwiseAbs().maxCoeff(), 1e-20);
}

TEST(Clt, SlopeOfPowerLaw)
{
  std::vector<Trajectory> reps;
  for (int r = 0; r < 40; ++r) {
    Trajectory t;
    const double z = (r % 2 ? 1.0 : -1.0) * (1.0 + 0.01 * r);
    for (std::int64_t k = 0; k <= 5000; k += 100) {
      const double scale = k == 0 ? 1.0 : std::pow(static_cast<double>(k), -0.4);
      t.records.push_back({Vector{{z * scale}}, Vector{{0.0}}, k});
    }
    t.terminal = t.records.back();
    reps.push_back(t);
  }
  const auto s = clt_diagnostics(reps, Vector{{0.0, 0.0}}, 0.8);
  EXPECT_NEAR(s.mse_slope, -0.8, 1e-10);
  EXPECT_NEAR(s.checkpoints[1].scaled_mse, s.checkpoints[2].scaled_mse, 1e-10);
}
