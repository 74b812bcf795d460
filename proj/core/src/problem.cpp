#include "ccsa/problem.hpp"

#include "ccsa/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ccsa {

namespace {

void require_same_dim(const Vector& x, const AdmissibleBox& box)
{
  if (x.size() != box.dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch: vector has " << x.size() << " entries, box has "
        << box.dim();
    throw ValidationError(msg.str());
  }
}

void require_positive_scale(double scale)
{
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw ValidationError("noise scale must be positive and finite");
}

double normal_pdf(double z)
{
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_ccdf(double z)
{
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

} // namespace

// ---------------------------------------------------------------------------
// Admissible set and projections

AdmissibleBox AdmissibleBox::unbounded(Eigen::Index dim)
{
  return {Vector::Constant(dim, -kInfinity), Vector::Constant(dim, kInfinity)};
}

AdmissibleBox AdmissibleBox::cube(Eigen::Index dim, double lo, double hi)
{
  return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

bool AdmissibleBox::contains(const Vector& x) const
{
  if (x.size() != dim())
    return false;
  return ((x.array() >= lower.array()) && (x.array() <= upper.array())).all();
}

void AdmissibleBox::validate() const
{
  if (lower.size() != upper.size())
    throw ValidationError("box bounds have different dimensions");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i])
      throw ValidationError("box requires lower <= upper componentwise");
  }
}

Vector project_admissible(const Vector& x, const AdmissibleBox& box)
{
  require_same_dim(x, box);
  return x.cwiseMax(box.lower).cwiseMin(box.upper);
}

Vector project_dual(const Vector& lambda, double cap)
{
  return lambda.cwiseMax(0.0).cwiseMin(cap);
}

// ---------------------------------------------------------------------------
// Quintic distribution

double quintic_cdf(double x, double center, double scale)
{
  require_positive_scale(scale);
  const double t = (x - center) / scale;
  if (t <= -1.0)
    return 0.0;
  if (t >= 1.0)
    return 1.0;
  const double t2 = t * t;
  return (((3.0 * t2 - 10.0) * t2 + 15.0) * t + 8.0) / 16.0;
}

double quintic_density(double x, double center, double scale)
{
  require_positive_scale(scale);
  const double t = (x - center) / scale;
  if (t <= -1.0 || t >= 1.0)
    return 0.0;
  const double w = 1.0 - t * t;
  return 15.0 * w * w / (16.0 * scale);
}

double quintic_quantile(double p, double center, double scale)
{
  require_positive_scale(scale);
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError("quantile level must lie in [0, 1]");
  double lo = center - scale;
  double hi = center + scale;
  if (p == 0.0)
    return lo;
  if (p == 1.0)
    return hi;
  // F is strictly increasing on the support, so bisection always brackets.
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (quintic_cdf(mid, center, scale) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Noise

NoiseModel NoiseModel::quintic(double xi_bar, double sigma)
{
  NoiseModel m{NoiseKind::quintic, xi_bar, sigma};
  m.validate();
  return m;
}

NoiseModel NoiseModel::gaussian(double mean, double stddev)
{
  NoiseModel m{NoiseKind::gaussian, mean, stddev};
  m.validate();
  return m;
}

double NoiseModel::cdf(double x) const
{
  switch (kind) {
    case NoiseKind::quintic:
      return quintic_cdf(x, center, scale);
    case NoiseKind::gaussian:
      return normal_cdf((x - center) / scale);
  }
  return 0.0;
}

double NoiseModel::density(double x) const
{
  switch (kind) {
    case NoiseKind::quintic:
      return quintic_density(x, center, scale);
    case NoiseKind::gaussian:
      return normal_pdf((x - center) / scale) / scale;
  }
  return 0.0;
}

std::pair<double, double> NoiseModel::support() const
{
  if (kind == NoiseKind::quintic)
    return {center - scale, center + scale};
  // exp(-72) ~ 5e-32: the tail mass beyond 12 sd is far below double epsilon.
  return {center - 12.0 * scale, center + 12.0 * scale};
}

void NoiseModel::validate() const
{
  if (!std::isfinite(center))
    throw ValidationError("noise center must be finite");
  require_positive_scale(scale);
}

NoiseStream::NoiseStream(std::uint64_t seed)
  : seed_(seed)
  , engine_(seed)
{}

double NoiseStream::uniform()
{
  ++draws_;
  return uniform_(engine_);
}

double NoiseStream::standard_normal()
{
  ++draws_;
  return normal_(engine_);
}

double sample_noise(const NoiseModel& model, NoiseStream& stream)
{
  switch (model.kind) {
    case NoiseKind::quintic:
      return quintic_quantile(stream.uniform(), model.center, model.scale);
    case NoiseKind::gaussian:
      return model.center + model.scale * stream.standard_normal();
  }
  return model.center;
}

// ---------------------------------------------------------------------------
// Problem

std::vector<std::string> ChanceConstrainedProblem::dual_names() const
{
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < dim_lambda(); ++i)
    names.push_back("l" + std::to_string(i + 1));
  return names;
}

void ChanceConstrainedProblem::validate() const
{
  if (dim_u <= 0)
    throw ValidationError("problem dimension must be positive");
  if (!cost || !cost_grad || !constraint || !constraint_grad)
    throw ValidationError("problem '" + name + "' is missing a callable");
  if (!(prob_level > 0.0 && prob_level < 1.0))
    throw ValidationError("probability level must lie in (0, 1)");
  if (admissible.dim() != dim_u)
    throw ValidationError("admissible box dimension does not match the problem");
  admissible.validate();
  noise.validate();
  for (const auto& row : linear_dualized) {
    if (row.coeffs.size() != dim_u)
      throw ValidationError("linear constraint dimension does not match the problem");
  }
}

ChanceConstrainedProblem make_portfolio_problem(const PortfolioParams& params)
{
  const double l = params.l;
  const double b = params.b;
  if (!(params.pi > 0.0 && params.pi < 1.0))
    throw ValidationError("probability level must lie in (0, 1)");

  // Satisfaction from consumption: f(x) = -x^2/2 + 2x.
  auto satisfaction = [](double x) { return -0.5 * x * x + 2.0 * x; };
  auto satisfaction_slope = [](double x) { return 2.0 - x; };

  ChanceConstrainedProblem p;
  p.name = "portfolio";
  p.dim_u = 2;
  p.primal_names = {"u", "v"};
  p.threshold = 0.0;
  p.prob_level = params.pi;
  p.noise = NoiseModel::quintic(params.xi_bar, params.sigma);
  p.admissible = AdmissibleBox::cube(2, 0.0, 1.0);
  p.linear_dualized.push_back({Vector::Ones(2), 1.0});

  p.cost = [=](const Vector& x, double xi) {
    return -satisfaction(1.0 - x[0] - x[1]) - (1.0 + b) * x[0] - (1.0 + xi) * x[1];
  };
  p.cost_grad = [=](const Vector& x, double xi) {
    const double s = satisfaction_slope(1.0 - x[0] - x[1]);
    Vector g(2);
    g << s - (1.0 + b), s - (1.0 + xi);
    return g;
  };
  // theta <= 0  <=>  (1+b)u + (1+xi)v >= 1+l
  p.constraint = [=](const Vector& x, double xi) {
    return (1.0 + l) - (1.0 + b) * x[0] - (1.0 + xi) * x[1];
  };
  p.constraint_grad = [=](const Vector&, double xi) {
    Vector g(2);
    g << -(1.0 + b), -(1.0 + xi);
    return g;
  };

  const NoiseModel noise = p.noise;
  AnalyticOracles oracles;
  oracles.probability = [=](const Vector& x) {
    const double gap = (1.0 + l) - (1.0 + b) * x[0];
    const double v = x[1];
    if (v == 0.0)
      return gap <= 0.0 ? 1.0 : 0.0;
    const double s = gap / v - 1.0;
    // v > 0: need xi >= s; v < 0: need xi <= s.
    return v > 0.0 ? 1.0 - noise.cdf(s) : noise.cdf(s);
  };
  oracles.probability_gradient = [=](const Vector& x) {
    const double v = x[1];
    if (v == 0.0)
      throw OracleUnavailable(
        "portfolio probability is discontinuous at v = 0; gradient undefined");
    const double gap = (1.0 + l) - (1.0 + b) * x[0];
    const double s = gap / v - 1.0;
    const double q = noise.density(s);
    const double sign = v > 0.0 ? 1.0 : -1.0;
    Vector g(2);
    g << sign * q * (1.0 + b) / v, sign * q * gap / (v * v);
    return g;
  };
  oracles.expected_cost_gradient = [=](const Vector& x) {
    const double s = satisfaction_slope(1.0 - x[0] - x[1]);
    Vector g(2);
    g << s - (1.0 + b), s - (1.0 + noise.mean());
    return g;
  };
  p.oracles = std::move(oracles);
  p.validate();
  return p;
}

ChanceConstrainedProblem make_toy_problem(const ToyParams& params)
{
  if (!(params.pi > 0.0 && params.pi < 1.0))
    throw ValidationError("probability level must lie in (0, 1)");

  ChanceConstrainedProblem p;
  p.name = "toy";
  p.dim_u = 1;
  p.primal_names = {"u"};
  p.threshold = 0.0;
  p.prob_level = params.pi;
  p.noise = NoiseModel::gaussian(params.mean, params.stddev);
  p.admissible = AdmissibleBox::unbounded(1);

  p.cost = [](const Vector& x, double) { return 0.5 * (x[0] - 1.0) * (x[0] - 1.0); };
  p.cost_grad = [](const Vector& x, double) { return Vector::Constant(1, x[0] - 1.0); };
  // P(u <= xi) >= pi
  p.constraint = [](const Vector& x, double xi) { return x[0] - xi; };
  p.constraint_grad = [](const Vector&, double) { return Vector::Constant(1, 1.0); };

  const double mean = params.mean;
  const double sd = params.stddev;
  AnalyticOracles oracles;
  oracles.probability = [=](const Vector& x) {
    return normal_ccdf((x[0] - mean) / sd);
  };
  oracles.probability_gradient = [=](const Vector& x) {
    return Vector::Constant(1, -normal_pdf((x[0] - mean) / sd) / sd);
  };
  oracles.expected_cost_gradient = [](const Vector& x) {
    return Vector::Constant(1, x[0] - 1.0);
  };
  p.oracles = std::move(oracles);
  p.validate();
  return p;
}

namespace {

const AnalyticOracles& require_oracles(const ChanceConstrainedProblem& problem)
{
  if (!problem.oracles)
    throw OracleUnavailable("problem '" + problem.name + "' has no closed-form oracle");
  return *problem.oracles;
}

void require_dim(const ChanceConstrainedProblem& problem, const Vector& u)
{
  if (u.size() != problem.dim_u)
    throw ValidationError("point dimension does not match the problem");
}

} // namespace

double analytic_probability(const ChanceConstrainedProblem& problem, const Vector& u)
{
  require_dim(problem, u);
  return require_oracles(problem).probability(u);
}

Vector analytic_probability_gradient(const ChanceConstrainedProblem& problem,
                                     const Vector& u)
{
  require_dim(problem, u);
  return require_oracles(problem).probability_gradient(u);
}

Vector expected_cost_gradient(const ChanceConstrainedProblem& problem, const Vector& u)
{
  require_dim(problem, u);
  return require_oracles(problem).expected_cost_gradient(u);
}

} // namespace ccsa
