#include "ccsa/solver.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>

namespace ccsa {

Vector IterateState::flat() const
{
  Vector x(u.size() + lambda.size());
  x << u, lambda;
  return x;
}

IterateState IterateState::from_flat(const Vector& x, Eigen::Index dim_u, std::int64_t k)
{
  return {x.head(dim_u), x.tail(x.size() - dim_u), k};
}

void RunConfig::validate(const ChanceConstrainedProblem& problem) const
{
  estimator.validate();
  schedules.validate();
  if (initial.u.size() != problem.dim_u)
    throw ValidationError("initial primal point has the wrong dimension");
  if (initial.lambda.size() != problem.dim_lambda())
    throw ValidationError("initial multiplier vector has the wrong dimension");
  if ((initial.lambda.array() < 0.0).any())
    throw ValidationError("initial multipliers must be nonnegative");
  if (iterations < 0)
    throw ValidationError("iteration count must be nonnegative");
  if (record_stride < 1)
    throw ValidationError("record stride must be at least 1");
  if (!(lambda_cap > 0.0))
    throw ValidationError("multiplier cap must be positive");
}

namespace {

bool diverged(const IterateState& s)
{
  if (!s.u.allFinite() || !s.lambda.allFinite())
    return true;
  return std::sqrt(s.u.squaredNorm() + s.lambda.squaredNorm()) > kDivergenceBound;
}

// sum_i lambda_i a_i over the dualized linear rows
Vector linear_pull(const ChanceConstrainedProblem& problem, const Vector& lambda)
{
  Vector pull = Vector::Zero(problem.dim_u);
  for (std::size_t i = 0; i < problem.linear_dualized.size(); ++i)
    pull += lambda[static_cast<Eigen::Index>(i)] * problem.linear_dualized[i].coeffs;
  return pull;
}

} // namespace

IterateState arrow_hurwicz_step(const IterateState& state,
                                const ChanceConstrainedProblem& problem,
                                const EstimatorConfig& estimator,
                                const ScheduleSet& schedules, NoiseStream& stream,
                                double lambda_cap)
{
  const std::int64_t next = state.k + 1;
  const ScheduleValues sv = evaluate_schedules(schedules, next);
  EstimatorConfig est = estimator;
  est.smoothing = sv.smoothing;

  const double xi = sample_noise(problem.noise, stream);
  const Eigen::Index ip = problem.prob_multiplier_index();
  const double lambda_p = state.lambda[ip];

  // The dualized constraint is pi - P(u) <= 0, so its gradient is -P'(u).
  const Vector cost_grad = est.kind == EstimatorKind::exact
                             ? expected_cost_gradient(problem, state.u)
                             : problem.cost_grad(state.u, xi);
  Vector direction = cost_grad + linear_pull(problem, state.lambda);
  if (lambda_p != 0.0)
    direction -= lambda_p * probability_gradient_estimate(problem, est, state.u, xi);

  IterateState out;
  out.k = next;
  out.u = project_admissible(state.u - sv.primal_step * direction, problem.admissible);

  Vector lambda = state.lambda;
  for (std::size_t i = 0; i < problem.linear_dualized.size(); ++i) {
    const auto& row = problem.linear_dualized[i];
    lambda[static_cast<Eigen::Index>(i)] += sv.dual_step * (row.coeffs.dot(out.u) - row.bound);
  }
  lambda[ip] += sv.dual_step * (problem.prob_level - probability_estimate(problem, est, out.u, xi));
  out.lambda = project_dual(lambda, lambda_cap);

  if (diverged(out))
    throw DivergenceError("iterate diverged at k = " + std::to_string(next), state);
  return out;
}

Trajectory run(const ChanceConstrainedProblem& problem, const RunConfig& config)
{
  config.validate(problem);

  Trajectory traj;
  traj.seed = config.seed;
  NoiseStream stream(config.seed);

  IterateState state = config.initial;
  state.k = 0;
  state.u = project_admissible(state.u, problem.admissible);
  state.lambda = project_dual(state.lambda, config.lambda_cap);
  traj.records.reserve(static_cast<std::size_t>(config.iterations / config.record_stride + 2));
  traj.records.push_back(state);

  for (std::int64_t k = 0; k < config.iterations; ++k) {
    try {
      state = arrow_hurwicz_step(state, problem, config.estimator, config.schedules, stream,
                                 config.lambda_cap);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.what(), traj.records.back());
    }
    if (state.k % config.record_stride == 0 || state.k == config.iterations)
      traj.records.push_back(state);
  }
  traj.terminal = state;
  return traj;
}

double kt_residual(const ChanceConstrainedProblem& problem, const Vector& u,
                   const Vector& lambda, double eps, double rho)
{
  if (u.size() != problem.dim_u || lambda.size() != problem.dim_lambda())
    throw ValidationError("point dimension does not match the problem");
  if (!(eps > 0.0) || !(rho > 0.0))
    throw ValidationError("kt_residual requires positive eps and rho");

  const Eigen::Index ip = problem.prob_multiplier_index();
  const Vector grad = expected_cost_gradient(problem, u) + linear_pull(problem, lambda) -
                      lambda[ip] * analytic_probability_gradient(problem, u);
  const Vector primal_gap = u - project_admissible(u - eps * grad, problem.admissible);

  Vector residual(lambda.size());
  for (std::size_t i = 0; i < problem.linear_dualized.size(); ++i) {
    const auto& row = problem.linear_dualized[i];
    residual[static_cast<Eigen::Index>(i)] = row.coeffs.dot(u) - row.bound;
  }
  residual[ip] = problem.prob_level - analytic_probability(problem, u);
  const Vector dual_gap = lambda - project_dual(lambda + rho * residual);

  return primal_gap.norm() + dual_gap.norm();
}

IterateState solve_deterministic(const ChanceConstrainedProblem& problem,
                                 const IterateState& initial, double eps, double rho,
                                 double tolerance, std::int64_t max_iterations)
{
  if (!(eps > 0.0) || !(rho > 0.0))
    throw ValidationError("solve_deterministic requires positive eps and rho");
  if (initial.u.size() != problem.dim_u || initial.lambda.size() != problem.dim_lambda())
    throw ValidationError("initial point dimension does not match the problem");

  const Eigen::Index ip = problem.prob_multiplier_index();
  IterateState state{project_admissible(initial.u, problem.admissible),
                     project_dual(initial.lambda), 0};
  for (std::int64_t k = 1; k <= max_iterations; ++k) {
    Vector direction = expected_cost_gradient(problem, state.u) +
                       linear_pull(problem, state.lambda);
    if (state.lambda[ip] != 0.0)
      direction -= state.lambda[ip] * analytic_probability_gradient(problem, state.u);

    IterateState next;
    next.k = k;
    next.u = project_admissible(state.u - eps * direction, problem.admissible);
    Vector lambda = state.lambda;
    for (std::size_t i = 0; i < problem.linear_dualized.size(); ++i) {
      const auto& row = problem.linear_dualized[i];
      lambda[static_cast<Eigen::Index>(i)] += rho * (row.coeffs.dot(next.u) - row.bound);
    }
    lambda[ip] += rho * (problem.prob_level - analytic_probability(problem, next.u));
    next.lambda = project_dual(lambda);

    if (diverged(next))
      throw DivergenceError("deterministic iteration diverged", state);
    const double move =
      std::sqrt((next.u - state.u).squaredNorm() + (next.lambda - state.lambda).squaredNorm());
    state = std::move(next);
    if (move < tolerance)
      return state;
  }
  throw DivergenceError("deterministic iteration did not settle", state);
}

ToySolution solve_toy_deterministic(const ToyParams& params)
{
  if (!(params.pi > 0.0 && params.pi < 1.0))
    throw ValidationError("probability level must lie in (0, 1)");
  // P(u <= xi) = pi  =>  u is the (1 - pi) quantile of xi.
  const boost::math::normal_distribution<double> standard;
  const double z = boost::math::quantile(standard, 1.0 - params.pi);
  const double u = params.mean + params.stddev * z;
  // (u - 1) + lambda F'(u) = 0 with F'(u) = phi(z) / sd.
  const double density = boost::math::pdf(standard, z) / params.stddev;
  return {u, (1.0 - u) / density};
}

} // namespace ccsa
