#include "ccsa/estimators.hpp"

#include "ccsa/error.hpp"

#include <cmath>
#include <string>

namespace ccsa {

const char* to_string(EstimatorKind kind) noexcept
{
  switch (kind) {
    case EstimatorKind::ac:
      return "ac";
    case EstimatorKind::fd:
      return "fd";
    case EstimatorKind::exact:
      return "exact";
  }
  return "unknown";
}

const char* to_string(DualEstimateMode mode) noexcept
{
  switch (mode) {
    case DualEstimateMode::raw_indicator:
      return "raw-indicator";
    case DualEstimateMode::mollified:
      return "mollified";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view text)
{
  if (text == "ac")
    return EstimatorKind::ac;
  if (text == "fd")
    return EstimatorKind::fd;
  if (text == "exact")
    return EstimatorKind::exact;
  throw ValidationError("unknown estimator kind '" + std::string(text) + "'");
}

DualEstimateMode parse_dual_estimate_mode(std::string_view text)
{
  if (text == "raw-indicator")
    return DualEstimateMode::raw_indicator;
  if (text == "mollified")
    return DualEstimateMode::mollified;
  throw ValidationError("unknown dual estimate mode '" + std::string(text) + "'");
}

EstimatorConfig EstimatorConfig::ac(double r, MollifierKernel kernel)
{
  return {EstimatorKind::ac, kernel, r, DualEstimateMode::mollified};
}

EstimatorConfig EstimatorConfig::fd(double c)
{
  return {EstimatorKind::fd, MollifierKernel{}, c, DualEstimateMode::raw_indicator};
}

EstimatorConfig EstimatorConfig::exact()
{
  return {EstimatorKind::exact, MollifierKernel{}, 1.0, DualEstimateMode::raw_indicator};
}

void EstimatorConfig::validate() const
{
  if (!(smoothing > 0.0) || !std::isfinite(smoothing))
    throw ValidationError("smoothing parameter must be positive");
}

double indicator_estimate(const ChanceConstrainedProblem& problem, const Vector& u,
                          double xi)
{
  // Closed inequality: the boundary counts as satisfied.
  return problem.constraint(u, xi) <= problem.threshold ? 1.0 : 0.0;
}

double ac_probability_estimate(const ChanceConstrainedProblem& problem, const Vector& u,
                               double xi, const MollifierKernel& kernel, double r)
{
  const double z = (problem.constraint(u, xi) - problem.threshold) / r;
  return 1.0 - kernel.cumulative(z);
}

Vector ac_gradient_estimate(const ChanceConstrainedProblem& problem, const Vector& u,
                            double xi, const MollifierKernel& kernel, double r)
{
  const double z = (problem.constraint(u, xi) - problem.threshold) / r;
  const double weight = kernel.evaluate(z);
  if (weight == 0.0)
    return Vector::Zero(u.size());
  return (-weight / r) * problem.constraint_grad(u, xi);
}

Vector fd_gradient_estimate(const ChanceConstrainedProblem& problem, const Vector& u,
                            double xi, double c)
{
  Vector grad(u.size());
  Vector shifted = u;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    shifted[j] = u[j] + c;
    const double up = indicator_estimate(problem, shifted, xi);
    shifted[j] = u[j] - c;
    const double down = indicator_estimate(problem, shifted, xi);
    shifted[j] = u[j];
    grad[j] = (up - down) / (2.0 * c);
  }
  return grad;
}

Vector probability_gradient_estimate(const ChanceConstrainedProblem& problem,
                                     const EstimatorConfig& config, const Vector& u,
                                     double xi)
{
  switch (config.kind) {
    case EstimatorKind::ac:
      return ac_gradient_estimate(problem, u, xi, config.kernel, config.smoothing);
    case EstimatorKind::fd:
      return fd_gradient_estimate(problem, u, xi, config.smoothing);
    case EstimatorKind::exact:
      return analytic_probability_gradient(problem, u);
  }
  return Vector::Zero(u.size());
}

double probability_estimate(const ChanceConstrainedProblem& problem,
                            const EstimatorConfig& config, const Vector& u, double xi)
{
  if (config.kind == EstimatorKind::exact)
    return analytic_probability(problem, u);
  if (config.dual_mode == DualEstimateMode::mollified)
    return ac_probability_estimate(problem, u, xi, config.kernel, config.smoothing);
  return indicator_estimate(problem, u, xi);
}

} // namespace ccsa
