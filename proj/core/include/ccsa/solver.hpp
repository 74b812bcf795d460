#pragma once

#include "ccsa/error.hpp"
#include "ccsa/estimators.hpp"
#include "ccsa/problem.hpp"
#include "ccsa/schedules.hpp"

#include <cstdint>
#include <vector>

namespace ccsa {

//! Primal-dual iterate x = (u, lambda) at iteration k.
struct IterateState
{
  Vector u;
  Vector lambda; // linear-row multipliers first, probability multiplier last
  std::int64_t k = 0;

  /// (u, lambda) stacked.
  Vector flat() const;
  static IterateState from_flat(const Vector& x, Eigen::Index dim_u, std::int64_t k = 0);
};

class DivergenceError : public Error
{
public:
  DivergenceError(const std::string& what, IterateState last_state)
    : Error(ErrorKind::divergence, what)
    , state_(std::move(last_state))
  {}

  const IterateState& state() const noexcept { return state_; }

private:
  IterateState state_;
};

/// Iterates with |x| beyond this are treated as diverged.
inline constexpr double kDivergenceBound = 1e6;

struct RunConfig
{
  EstimatorConfig estimator;
  ScheduleSet schedules;
  IterateState initial;
  std::int64_t iterations = 5000;
  std::int64_t record_stride = 1;
  std::uint64_t seed = 1;
  double lambda_cap = kInfinity;

  void validate(const ChanceConstrainedProblem& problem) const;
};

struct Trajectory
{
  std::vector<IterateState> records; // strictly increasing k, starts at k = 0
  IterateState terminal;
  std::uint64_t seed = 0;
};

/// One stochastic Arrow-Hurwicz update. Draws exactly one xi from `stream`
/// and uses it for both the primal and the dual half-step. The smoothing
/// value in `estimator` is replaced by the schedule's value at k + 1.
IterateState arrow_hurwicz_step(const IterateState& state,
                                const ChanceConstrainedProblem& problem,
                                const EstimatorConfig& estimator,
                                const ScheduleSet& schedules, NoiseStream& stream,
                                double lambda_cap = kInfinity);

/// Runs config.iterations steps from config.initial. Convergence conditions
/// are not enforced here; pathological tunings are allowed on purpose.
Trajectory run(const ChanceConstrainedProblem& problem, const RunConfig& config);

/// Fixed-point gap of the projected optimality system, using exact
/// expectations. Zero iff (u, lambda) is an equilibrium.
double kt_residual(const ChanceConstrainedProblem& problem, const Vector& u,
                   const Vector& lambda, double eps, double rho);

/// Deterministic projected Arrow-Hurwicz with exact expectations and
/// constant steps, iterated until the update moves less than `tolerance`.
/// Throws DivergenceError when max_iterations is exhausted.
IterateState solve_deterministic(const ChanceConstrainedProblem& problem,
                                 const IterateState& initial, double eps, double rho,
                                 double tolerance = 1e-13,
                                 std::int64_t max_iterations = 1'000'000);

struct ToySolution
{
  double u;
  double lambda;
};

/// Closed-form KT point of the scalar toy problem.
ToySolution solve_toy_deterministic(const ToyParams& params);
inline ToySolution solve_toy_deterministic(double pi)
{
  return solve_toy_deterministic(ToyParams{pi});
}

} // namespace ccsa
