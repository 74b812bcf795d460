#pragma once

#include "ccsa/kernels.hpp"
#include "ccsa/problem.hpp"

#include <string_view>

namespace ccsa {

enum class EstimatorKind
{
  ac,   // approximation by convolution (mollifier)
  fd,   // symmetric finite differences of the indicator
  exact // analytic oracles; deterministic mean-field iteration
};

/// Which estimate of P(u) drives the probability multiplier update.
enum class DualEstimateMode
{
  raw_indicator,
  mollified
};

const char* to_string(EstimatorKind kind) noexcept;
const char* to_string(DualEstimateMode mode) noexcept;
EstimatorKind parse_estimator_kind(std::string_view text);
DualEstimateMode parse_dual_estimate_mode(std::string_view text);

struct EstimatorConfig
{
  EstimatorKind kind = EstimatorKind::ac;
  MollifierKernel kernel{KernelShape::parabolic};
  double smoothing = 1.0; // r for AC, c for FD
  DualEstimateMode dual_mode = DualEstimateMode::mollified;

  /// AC defaults to the mollified dual estimate, FD to the raw indicator.
  static EstimatorConfig ac(double r, MollifierKernel kernel = MollifierKernel{});
  static EstimatorConfig fd(double c);
  static EstimatorConfig exact();

  void validate() const;
};

/// 1 if theta(u, xi) <= alpha, else 0.
double indicator_estimate(const ChanceConstrainedProblem& problem, const Vector& u,
                          double xi);

/// 1 - H((theta - alpha) / r): the mollified indicator in closed form.
double ac_probability_estimate(const ChanceConstrainedProblem& problem, const Vector& u,
                               double xi, const MollifierKernel& kernel, double r);

/// -(1/r) h((theta - alpha)/r) theta'_u: biased single-sample estimate of P'(u).
Vector ac_gradient_estimate(const ChanceConstrainedProblem& problem, const Vector& u,
                            double xi, const MollifierKernel& kernel, double r);

/// Symmetric difference of the indicator along each axis, sharing one xi.
Vector fd_gradient_estimate(const ChanceConstrainedProblem& problem, const Vector& u,
                            double xi, double c);

/// Dispatch on the configured kind (exact ignores xi).
Vector probability_gradient_estimate(const ChanceConstrainedProblem& problem,
                                     const EstimatorConfig& config, const Vector& u,
                                     double xi);

/// Estimate of P(u) per config.dual_mode (exact ignores xi).
double probability_estimate(const ChanceConstrainedProblem& problem,
                            const EstimatorConfig& config, const Vector& u, double xi);

} // namespace ccsa
