#pragma once

#include "ccsa/analysis.hpp"
#include "ccsa/estimators.hpp"
#include "ccsa/problem.hpp"
#include "ccsa/schedules.hpp"
#include "ccsa/solver.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccsa {

//! Problem by name plus parameter overrides.
struct ProblemSpec
{
  std::string name = "portfolio"; // "portfolio" | "toy"
  PortfolioParams portfolio;
  ToyParams toy;

  /// Sets the probability level of whichever problem is selected.
  void set_pi(double pi);
};

ChanceConstrainedProblem make_problem(const ProblemSpec& spec);
ChanceConstrainedProblem make_problem(std::string_view name);

/// portfolio: (0.2, 0.8, 0.5, 0.3); toy: (-2.5, 1.0).
IterateState default_initial_state(const ChanceConstrainedProblem& problem);

/// Equilibrium of the exact mean field, reached by deterministic
/// Arrow-Hurwicz from default_initial_state.
IterateState reference_solution(const ChanceConstrainedProblem& problem);

//! Schedule constants: eps = d/(e+k)^gamma, rho = f/(g+k)^gamma,
//! r = a k^{-beta/2} (AC) or c = b k^{-beta/2} (FD).
struct TuningConstants
{
  double gamma = 1.0;
  double beta = 0.4;
  double a = 1.30;
  double b = 0.63;
  double d = 3.0;
  double e = 20.0;
  double f = 3.0;
  double g = 20.0;
  FdHypothesis hypothesis = FdHypothesis::h3;

  ScheduleSet schedules(EstimatorKind kind) const;
  /// Exponent conditions for the given estimator.
  ConditionReport check(EstimatorKind kind) const;
  void validate() const;
};

struct VariantConfig
{
  std::string label = "AC";
  EstimatorConfig estimator = EstimatorConfig::ac(1.0);
  TuningConstants tuning;
};

struct ExperimentConfig
{
  ProblemSpec problem;
  std::optional<IterateState> initial; // default_initial_state when empty
  std::int64_t iterations = 5000;
  std::int64_t record_stride = 0; // 0: 1 up to 5000 iterations, else K/5000
  double lambda_cap = kInfinity;
  std::size_t replications = 100;
  std::uint64_t base_seed = 1;
  std::vector<std::uint64_t> seeds; // overrides base_seed when non-empty
  std::vector<VariantConfig> variants = {VariantConfig{}};
  std::filesystem::path output_dir = "out";
  bool emit_plots = true;
  unsigned workers = 1;

  /// The seeds every variant runs with, in ascending order.
  std::vector<std::uint64_t> seed_list() const;
  std::int64_t effective_stride() const;
  void validate() const;
};

//! Single run as read from a config document.
struct SolveConfig
{
  ProblemSpec problem;
  VariantConfig variant;
  std::optional<IterateState> initial;
  std::int64_t iterations = 5000;
  std::int64_t record_stride = 1;
  std::uint64_t seed = 1;
  double lambda_cap = kInfinity;

  RunConfig run_config(const ChanceConstrainedProblem& problem) const;
};

//! Mean and population standard deviation of x^k - x* per checkpoint.
struct AggregateSeries
{
  std::string label;
  std::vector<std::string> names; // u, v, l1, l2 for the portfolio
  std::vector<std::int64_t> k;
  Eigen::MatrixXd mean;   // checkpoints x coordinates
  Eigen::MatrixXd stddev; // checkpoints x coordinates
  std::size_t replications = 0; // included in the statistics
  std::vector<std::uint64_t> diverged_seeds;
};

/// Reduces trajectories in the order given; all must share record k values.
AggregateSeries aggregate(const std::string& label, const std::vector<std::string>& names,
                          const std::vector<Trajectory>& trajectories, const Vector& x_star);

struct VariantResult
{
  AggregateSeries series;
  std::vector<Trajectory> trajectories; // seed order, divergent runs removed
};

struct ExperimentResult
{
  Vector x_star;
  std::vector<std::uint64_t> seeds;
  std::vector<VariantResult> variants;
};

/// Runs every variant over the same seeds, `workers` replications at a time.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Column names for the coordinate errors of a problem.
std::vector<std::string> coordinate_names(const ChanceConstrainedProblem& problem);

/// `k,mean_<name>,std_<name>,...` with 9 significant digits.
void emit_csv(const AggregateSeries& series, const std::filesystem::path& path);

struct PlotSource
{
  const AggregateSeries* series;
  std::filesystem::path csv;
};

/// gnuplot script with one panel per coordinate, mean +- std bands,
/// first source solid and the rest dashed.
void emit_plot_script(const std::vector<PlotSource>& sources, const std::filesystem::path& path);

/// smoothing,mean_0..,var_0..,bias_0..,mqe
void emit_bias_variance_csv(const std::vector<BiasVarianceReport>& reports,
                            const std::filesystem::path& path);

/// Writes one row per record: k then the flat state.
void emit_trajectory_csv(const Trajectory& trajectory, const std::vector<std::string>& names,
                         const std::filesystem::path& path);

// JSON documents. Parsers reject unknown keys with ValidationError.
ExperimentConfig parse_experiment_config(std::string_view json);
SolveConfig parse_solve_config(std::string_view json);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
SolveConfig load_solve_config(const std::filesystem::path& path);
std::string to_json(const ExperimentConfig& config);
std::string to_json(const SolveConfig& config);
std::string to_json(const BiasVarianceReport& report);
std::string to_json(const LinearizationReport& report);
std::string to_json(const CltSummary& summary);

} // namespace ccsa
