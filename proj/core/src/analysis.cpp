#include "ccsa/analysis.hpp"

#include "ccsa/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ccsa {

namespace {

std::vector<double> crossings_at(const ChanceConstrainedProblem& problem, const Vector& u,
                                 std::initializer_list<double> offsets,
                                 const QuadratureOptions& options)
{
  std::vector<double> points;
  for (double offset : offsets) {
    const auto roots = constraint_crossings(problem, u, offset, options);
    points.insert(points.end(), roots.begin(), roots.end());
  }
  return points;
}

std::vector<double> estimator_breakpoints(const ChanceConstrainedProblem& problem,
                                          const EstimatorConfig& estimator, const Vector& u,
                                          double s, const QuadratureOptions& options)
{
  if (estimator.kind == EstimatorKind::ac)
    return crossings_at(problem, u, {-s, 0.0, s}, options);

  std::vector<double> points = crossings_at(problem, u, {0.0}, options);
  Vector shifted = u;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    for (double sign : {1.0, -1.0}) {
      shifted[j] = u[j] + sign * s;
      const auto roots = crossings_at(problem, shifted, {0.0}, options);
      points.insert(points.end(), roots.begin(), roots.end());
    }
    shifted[j] = u[j];
  }
  return points;
}

} // namespace

BiasVarianceReport bias_variance_oracle(const ChanceConstrainedProblem& problem,
                                        const EstimatorConfig& estimator, const Vector& u,
                                        double smoothing, double samples,
                                        const QuadratureOptions& options)
{
  if (estimator.kind == EstimatorKind::exact)
    throw ValidationError("bias_variance_oracle needs a sampling estimator (ac or fd)");
  if (!(smoothing > 0.0))
    throw ValidationError("smoothing parameter must be positive");
  if (!(samples > 0.0))
    throw ValidationError("sample count must be positive");

  const Vector exact = analytic_probability_gradient(problem, u);
  EstimatorConfig est = estimator;
  est.smoothing = smoothing;
  const auto points = estimator_breakpoints(problem, est, u, smoothing, options);

  const Eigen::Index n = u.size();
  BiasVarianceReport report;
  report.smoothing = smoothing;
  report.samples = samples;
  report.mean.resize(n);
  report.variance.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    auto component = [&](double xi) {
      return probability_gradient_estimate(problem, est, u, xi)[j];
    };
    const double m1 = noise_expectation(problem.noise, component, points, options);
    const double m2 = noise_expectation(
      problem.noise,
      [&](double xi) {
        const double g = component(xi);
        return g * g;
      },
      points, options);
    report.mean[j] = m1;
    report.variance[j] = std::max(0.0, m2 - m1 * m1);
  }
  report.bias = report.mean - exact;
  report.mqe = report.variance.sum() / samples + report.bias.squaredNorm();
  return report;
}

double indicator_mean(const ChanceConstrainedProblem& problem, const Vector& u,
                      const QuadratureOptions& options)
{
  return noise_expectation(
    problem.noise, [&](double xi) { return indicator_estimate(problem, u, xi); },
    constraint_crossings(problem, u, 0.0, options), options);
}

MqeConstants fit_mqe_constants(const ChanceConstrainedProblem& problem,
                               const EstimatorConfig& estimator, const Vector& u,
                               const std::vector<double>& grid,
                               const QuadratureOptions& options)
{
  if (grid.size() < 3)
    throw ValidationError("mqe fit needs at least three smoothing values");
  const auto m = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index n = u.size();

  Eigen::MatrixXd var_design(m, 3);
  Eigen::MatrixXd bias_design(m, 2);
  Eigen::MatrixXd var_rhs(m, n);
  Eigen::MatrixXd bias_rhs(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = grid[static_cast<std::size_t>(i)];
    const auto report = bias_variance_oracle(problem, estimator, u, s, 1.0, options);
    var_design.row(i) << 1.0, s, s * s;
    bias_design.row(i) << 1.0, s * s;
    var_rhs.row(i) = (report.variance * s).transpose();
    bias_rhs.row(i) = (report.bias / (s * s)).transpose();
  }

  MqeConstants out;
  out.variance_constants = var_design.colPivHouseholderQr().solve(var_rhs).row(0).transpose();
  out.bias_constants = bias_design.colPivHouseholderQr().solve(bias_rhs).row(0).transpose();
  out.A = out.variance_constants.sum();
  out.B = out.bias_constants.norm();
  return out;
}

SmoothingOptimum optimal_smoothing(double A, double B, double samples)
{
  if (!(A > 0.0) || !(B > 0.0) || !(samples > 0.0))
    throw ValidationError("optimal_smoothing requires positive A, B and N");
  const double s = std::pow(A / (4.0 * B * B * samples), 0.2);
  return {s, mqe_coefficient(A, B) / std::pow(samples, 0.8)};
}

double mqe_coefficient(double A, double B)
{
  return 5.0 * std::pow(A, 0.8) * std::pow(B, 0.4) / std::pow(4.0, 0.8);
}

Vector mean_field(const ChanceConstrainedProblem& problem, const Vector& u, const Vector& lambda)
{
  if (u.size() != problem.dim_u || lambda.size() != problem.dim_lambda())
    throw ValidationError("point dimension does not match the problem");
  const Eigen::Index ip = problem.prob_multiplier_index();

  Vector drift(u.size() + lambda.size());
  Vector primal = -expected_cost_gradient(problem, u);
  for (std::size_t i = 0; i < problem.linear_dualized.size(); ++i) {
    const auto& row = problem.linear_dualized[i];
    const auto idx = static_cast<Eigen::Index>(i);
    primal -= lambda[idx] * row.coeffs;
    drift[u.size() + idx] = row.coeffs.dot(u) - row.bound;
  }
  if (lambda[ip] != 0.0)
    primal += lambda[ip] * analytic_probability_gradient(problem, u);
  drift.head(u.size()) = primal;
  drift[u.size() + ip] = problem.prob_level - analytic_probability(problem, u);
  return drift;
}

Vector mean_field(const ChanceConstrainedProblem& problem, const Vector& x)
{
  return mean_field(problem, x.head(problem.dim_u), x.tail(x.size() - problem.dim_u));
}

OdePath ode_integrate(const ChanceConstrainedProblem& problem, const IterateState& initial,
                      double horizon, double dt, std::size_t record_every)
{
  if (!(dt > 0.0))
    throw ValidationError("ode step must be positive");
  if (!(horizon >= 0.0))
    throw ValidationError("ode horizon must be nonnegative");
  if (record_every == 0)
    throw ValidationError("record_every must be at least 1");

  const Eigen::Index nu = problem.dim_u;
  auto project = [&](const Vector& x) {
    Vector y(x.size());
    y << project_admissible(x.head(nu), problem.admissible),
      project_dual(x.tail(x.size() - nu));
    return y;
  };
  auto field = [&](const Vector& x) { return mean_field(problem, x); };

  OdePath path;
  Vector x = project(initial.flat());
  path.times.push_back(0.0);
  path.states.push_back(x);

  const auto steps = static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-9));
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double h = std::min(dt, horizon - dt * static_cast<double>(i - 1));
    const Vector k1 = field(x);
    const Vector k2 = field(x + 0.5 * h * k1);
    const Vector k3 = field(x + 0.5 * h * k2);
    const Vector k4 = field(x + h * k3);
    Vector next = project(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!next.allFinite())
      throw DivergenceError("ode integration produced a non-finite state",
                            IterateState::from_flat(x, nu, i - 1));
    x = std::move(next);
    if (i % static_cast<std::int64_t>(record_every) == 0 || i == steps) {
      path.times.push_back(std::min(horizon, dt * static_cast<double>(i)));
      path.states.push_back(x);
    }
  }
  return path;
}

LinearizationReport linearize(const ChanceConstrainedProblem& problem, const Vector& u,
                              const Vector& lambda, const std::vector<Eigen::Index>& indices,
                              double beta, double delta)
{
  const Eigen::Index nu = problem.dim_u;
  Vector x(u.size() + lambda.size());
  x << u, lambda;
  if (indices.empty())
    throw ValidationError("linearization needs at least one coordinate");
  for (auto idx : indices)
    if (idx < 0 || idx >= x.size())
      throw ValidationError("linearization index out of range");

  // Psi = -mean_field; columns by central differences.
  const auto m = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd full(x.size(), m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::Index j = indices[static_cast<std::size_t>(c)];
    Vector up = x;
    Vector down = x;
    up[j] += kLinearizationStep;
    down[j] -= kLinearizationStep;
    // A multiplier pushed below zero is still a valid argument for the field.
    full.col(c) = -(mean_field(problem, up.head(nu), up.tail(up.size() - nu)) -
                    mean_field(problem, down.head(nu), down.tail(down.size() - nu))) /
                  (2.0 * kLinearizationStep);
  }

  LinearizationReport report;
  report.indices = indices;
  report.matrix.resize(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    report.matrix.row(r) = full.row(indices[static_cast<std::size_t>(r)]);
  if (!report.matrix.allFinite())
    throw ValidationError("second differences are not finite at this point");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(report.matrix);
  if (solver.info() != Eigen::Success)
    throw ValidationError("eigenvalue computation failed");
  const Eigen::MatrixXcd vectors = solver.eigenvectors();
  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd a = report.matrix.cast<std::complex<double>>();
  const double scale = std::max(1.0, report.matrix.norm());
  for (Eigen::Index i = 0; i < m; ++i) {
    const double residual = (a * vectors.col(i) - values[i] * vectors.col(i)).norm();
    if (residual > 1e-8 * scale)
      throw ValidationError("ill-conditioned linearization: eigenpair residual too large");
    report.eigenvalues.push_back(values[i]);
  }
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](std::complex<double> p, std::complex<double> q) {
              if (p.real() != q.real())
                return p.real() < q.real();
              return p.imag() < q.imag();
            });

  report.min_real = report.eigenvalues.front().real();
  report.threshold = std::max(beta, 0.5 * (1.0 + delta));
  report.stable_gamma_below_one = report.min_real > 0.0;
  report.stable_gamma_one = report.min_real > report.threshold;
  return report;
}

const IterateState* find_record(const Trajectory& trajectory, std::int64_t k)
{
  const auto it = std::lower_bound(trajectory.records.begin(), trajectory.records.end(), k,
                                   [](const IterateState& s, std::int64_t key) { return s.k < key; });
  if (it != trajectory.records.end() && it->k == k)
    return &*it;
  if (trajectory.terminal.k == k && trajectory.terminal.u.size() > 0)
    return &trajectory.terminal;
  return nullptr;
}

namespace {

// Errors x^k - x* across replications, one column per replication.
Eigen::MatrixXd errors_at(const std::vector<Trajectory>& trajectories, const Vector& x_star,
                          std::int64_t k)
{
  Eigen::MatrixXd e(x_star.size(), static_cast<Eigen::Index>(trajectories.size()));
  for (std::size_t r = 0; r < trajectories.size(); ++r) {
    const IterateState* s = find_record(trajectories[r], k);
    if (s == nullptr)
      throw ValidationError("trajectory has no record at k = " + std::to_string(k));
    e.col(static_cast<Eigen::Index>(r)) = s->flat() - x_star;
  }
  return e;
}

} // namespace

CltSummary clt_diagnostics(const std::vector<Trajectory>& trajectories, const Vector& x_star,
                           double kappa, const CltOptions& options)
{
  if (trajectories.size() < options.min_replications)
    throw ValidationError("clt diagnostics need at least " +
                          std::to_string(options.min_replications) + " replications");
  const auto reps = static_cast<double>(trajectories.size());

  CltSummary summary;
  summary.replications = trajectories.size();
  for (std::int64_t k : options.checkpoints) {
    const Eigen::MatrixXd e = errors_at(trajectories, x_star, k);
    const double scale = std::pow(static_cast<double>(k), 0.5 * kappa);
    const Eigen::MatrixXd X = scale * e;

    CheckpointStatistics st;
    st.k = k;
    st.mean = X.rowwise().mean();
    const Eigen::MatrixXd centered = X.colwise() - st.mean;
    st.covariance = centered * centered.transpose() / reps;
    st.skewness.resize(X.rows());
    st.excess_kurtosis.resize(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double var = st.covariance(i, i);
      if (var > 0.0) {
        const Eigen::ArrayXd z = centered.row(i).array() / std::sqrt(var);
        st.skewness[i] = z.cube().mean();
        st.excess_kurtosis[i] = z.square().square().mean() - 3.0;
      } else {
        st.skewness[i] = 0.0;
        st.excess_kurtosis[i] = 0.0;
      }
    }
    st.mse = e.colwise().squaredNorm().mean();
    st.scaled_mse = std::pow(static_cast<double>(k), kappa) * st.mse;
    summary.checkpoints.push_back(std::move(st));
  }

  std::vector<double> logk;
  std::vector<double> logm;
  for (std::int64_t k = options.slope_from; k <= options.slope_to; k += options.slope_stride) {
    if (find_record(trajectories.front(), k) == nullptr)
      continue;
    const double mse = errors_at(trajectories, x_star, k).colwise().squaredNorm().mean();
    if (mse > 0.0) {
      logk.push_back(std::log(static_cast<double>(k)));
      logm.push_back(std::log(mse));
    }
  }
  if (logk.size() >= 2) {
    const Eigen::Map<const Eigen::VectorXd> xs(logk.data(), static_cast<Eigen::Index>(logk.size()));
    const Eigen::Map<const Eigen::VectorXd> ys(logm.data(), static_cast<Eigen::Index>(logm.size()));
    const double mx = xs.mean();
    const double my = ys.mean();
    const Eigen::VectorXd dx = xs.array() - mx;
    summary.mse_slope = dx.dot(ys - Eigen::VectorXd::Constant(ys.size(), my)) / dx.squaredNorm();
  }
  return summary;
}

} // namespace ccsa
