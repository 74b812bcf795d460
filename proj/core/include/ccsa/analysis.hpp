#pragma once

#include "ccsa/estimators.hpp"
#include "ccsa/problem.hpp"
#include "ccsa/quadrature.hpp"
#include "ccsa/solver.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace ccsa {

//! Exact first two moments of a gradient estimator at a fixed point.
struct BiasVarianceReport
{
  double smoothing = 0.0;
  double samples = 1.0; // N in the mqe
  Vector mean;
  Vector variance;
  Vector bias; // mean - analytic gradient
  double mqe = 0.0; // sum_j var_j / N + bias_j^2
};

/// Moments of the AC or FD estimate of P'(u) under the noise law, by
/// piecewise adaptive quadrature split where the integrand has kinks.
BiasVarianceReport bias_variance_oracle(const ChanceConstrainedProblem& problem,
                                        const EstimatorConfig& estimator, const Vector& u,
                                        double smoothing, double samples = 1.0,
                                        const QuadratureOptions& options = {});

/// E[indicator_estimate(u, xi)] by quadrature.
double indicator_mean(const ChanceConstrainedProblem& problem, const Vector& u,
                      const QuadratureOptions& options = {});

//! Leading constants of var ~ A/s and bias ~ B s^2 as s -> 0.
struct MqeConstants
{
  Vector variance_constants; // A_j
  Vector bias_constants;     // B_j, signed
  double A = 0.0;            // sum_j A_j
  double B = 0.0;            // |B_j| in the euclidean norm
};

/// Least-squares extrapolation to s = 0 of var*s (in 1, s, s^2) and
/// bias/s^2 (in 1, s^2) over the given smoothing grid.
MqeConstants fit_mqe_constants(const ChanceConstrainedProblem& problem,
                               const EstimatorConfig& estimator, const Vector& u,
                               const std::vector<double>& grid = {0.02, 0.04, 0.06, 0.08},
                               const QuadratureOptions& options = {});

struct SmoothingOptimum
{
  double smoothing = 0.0;
  double mqe = 0.0;
};

/// Minimizer of A/(sN) + B^2 s^4: s = (A/(4 B^2 N))^{1/5}.
SmoothingOptimum optimal_smoothing(double A, double B, double samples);

/// Leading MQE coefficient 5 A^{4/5} B^{2/5} / 4^{4/5}.
double mqe_coefficient(double A, double B);

/// Drift -Psi(x) of the mean ODE, laid out like IterateState::flat():
/// primal part, then linear-row residuals a.u - b, then pi - P(u).
Vector mean_field(const ChanceConstrainedProblem& problem, const Vector& u, const Vector& lambda);
Vector mean_field(const ChanceConstrainedProblem& problem, const Vector& x);

struct OdePath
{
  std::vector<double> times;
  std::vector<Vector> states; // flat (u, lambda)

  const Vector& terminal() const { return states.back(); }
};

/// Classical RK4 on x' = -Psi(x), projected back onto the admissible set
/// after every step.
OdePath ode_integrate(const ChanceConstrainedProblem& problem, const IterateState& initial,
                      double horizon, double dt, std::size_t record_every = 1);

struct LinearizationReport
{
  std::vector<Eigen::Index> indices; // flat coordinates kept
  Eigen::MatrixXd matrix;
  std::vector<std::complex<double>> eigenvalues; // sorted by real part, then imag
  double min_real = 0.0;
  double threshold = 0.0;           // max(beta, (1 + delta) / 2)
  bool stable_gamma_below_one = false; // min_real > 0
  bool stable_gamma_one = false;       // min_real > threshold
};

inline constexpr double kLinearizationStep = 1e-5;

/// Jacobian of Psi at x by central differences, restricted to `indices`
/// (flat coordinates), plus its spectrum and the stability verdicts.
LinearizationReport linearize(const ChanceConstrainedProblem& problem, const Vector& u,
                              const Vector& lambda, const std::vector<Eigen::Index>& indices,
                              double beta = 0.4, double delta = -0.2);

struct CheckpointStatistics
{
  std::int64_t k = 0;
  Vector mean;                 // of X^k = k^{kappa/2} (x^k - x*)
  Eigen::MatrixXd covariance;  // population covariance of X^k
  Vector skewness;
  Vector excess_kurtosis;
  double mse = 0.0;            // mean |x^k - x*|^2
  double scaled_mse = 0.0;     // k^kappa mse
};

struct CltOptions
{
  std::vector<std::int64_t> checkpoints = {1000, 2000, 5000};
  std::int64_t slope_from = 500;
  std::int64_t slope_to = 5000;
  std::int64_t slope_stride = 100;
  std::size_t min_replications = 30;
};

struct CltSummary
{
  std::vector<CheckpointStatistics> checkpoints;
  double mse_slope = 0.0; // log-log regression of mse against k
  std::size_t replications = 0;
};

/// Returns the recorded state at iteration k, or nullptr.
const IterateState* find_record(const Trajectory& trajectory, std::int64_t k);

CltSummary clt_diagnostics(const std::vector<Trajectory>& trajectories, const Vector& x_star,
                           double kappa, const CltOptions& options = {});

} // namespace ccsa
