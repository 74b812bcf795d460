#include "ccsa/harness.hpp"

#include "ccsa/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace ccsa {

void ProblemSpec::set_pi(double pi)
{
  if (name == "toy")
    toy.pi = pi;
  else
    portfolio.pi = pi;
}

ChanceConstrainedProblem make_problem(const ProblemSpec& spec)
{
  if (spec.name == "portfolio")
    return make_portfolio_problem(spec.portfolio);
  if (spec.name == "toy")
    return make_toy_problem(spec.toy);
  throw ValidationError("unknown problem '" + spec.name + "' (expected portfolio or toy)");
}

ChanceConstrainedProblem make_problem(std::string_view name)
{
  ProblemSpec spec;
  spec.name = std::string(name);
  return make_problem(spec);
}

IterateState default_initial_state(const ChanceConstrainedProblem& problem)
{
  IterateState s;
  if (problem.name == "portfolio") {
    s.u = Vector{{0.2, 0.8}};
    s.lambda = Vector{{0.5, 0.3}};
  } else if (problem.name == "toy") {
    s.u = Vector{{-2.5}};
    s.lambda = Vector{{1.0}};
  } else {
    s.u = Vector::Zero(problem.dim_u);
    s.lambda = Vector::Zero(problem.dim_lambda());
  }
  return s;
}

IterateState reference_solution(const ChanceConstrainedProblem& problem)
{
  return solve_deterministic(problem, default_initial_state(problem), 0.02, 0.02);
}

ScheduleSet TuningConstants::schedules(EstimatorKind kind) const
{
  ScheduleSet s;
  s.primal = {d, e, gamma};
  s.dual = {f, g, gamma};
  s.smoothing = {kind == EstimatorKind::fd ? b : a, 0.5 * beta};
  return s;
}

ConditionReport TuningConstants::check(EstimatorKind kind) const
{
  if (kind == EstimatorKind::fd)
    return check_conditions_fd(gamma, beta, hypothesis);
  return check_conditions_ac(gamma, beta);
}

void TuningConstants::validate() const
{
  if (!(gamma > 0.0) || !(beta > 0.0))
    throw ValidationError("gamma and beta must be positive");
  if (!(a > 0.0) || !(b > 0.0) || !(d > 0.0) || !(f > 0.0))
    throw ValidationError("tuning constants a, b, d, f must be positive");
  if (!(e >= 0.0) || !(g >= 0.0))
    throw ValidationError("tuning offsets e, g must be nonnegative");
}

std::vector<std::uint64_t> ExperimentConfig::seed_list() const
{
  std::vector<std::uint64_t> out = seeds;
  if (out.empty()) {
    out.reserve(replications);
    for (std::size_t i = 0; i < replications; ++i)
      out.push_back(base_seed + i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t ExperimentConfig::effective_stride() const
{
  if (record_stride > 0)
    return record_stride;
  return iterations <= 5000 ? 1 : iterations / 5000;
}

void ExperimentConfig::validate() const
{
  if (replications < 1 && seeds.empty())
    throw ValidationError("experiment needs at least one replication");
  if (iterations < 0)
    throw ValidationError("iteration count must be nonnegative");
  if (record_stride < 0)
    throw ValidationError("record stride must be nonnegative");
  if (variants.empty())
    throw ValidationError("experiment needs at least one variant");
  if (workers < 1)
    throw ValidationError("worker count must be at least 1");
  auto sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("seed list contains duplicates");
  for (const auto& v : variants) {
    v.estimator.validate();
    v.tuning.validate();
  }
}

RunConfig SolveConfig::run_config(const ChanceConstrainedProblem& problem) const
{
  RunConfig rc;
  rc.estimator = variant.estimator;
  rc.schedules = variant.tuning.schedules(variant.estimator.kind);
  rc.initial = initial.value_or(default_initial_state(problem));
  rc.iterations = iterations;
  rc.record_stride = record_stride;
  rc.seed = seed;
  rc.lambda_cap = lambda_cap;
  return rc;
}

std::vector<std::string> coordinate_names(const ChanceConstrainedProblem& problem)
{
  std::vector<std::string> names = problem.primal_names;
  if (names.size() != static_cast<std::size_t>(problem.dim_u)) {
    names.clear();
    for (Eigen::Index i = 0; i < problem.dim_u; ++i)
      names.push_back("u" + std::to_string(i + 1));
  }
  for (const auto& d : problem.dual_names())
    names.push_back(d);
  return names;
}

AggregateSeries aggregate(const std::string& label, const std::vector<std::string>& names,
                          const std::vector<Trajectory>& trajectories, const Vector& x_star)
{
  AggregateSeries out;
  out.label = label;
  out.names = names;
  out.replications = trajectories.size();
  if (trajectories.empty())
    return out;

  const auto& first = trajectories.front().records;
  const auto rows = static_cast<Eigen::Index>(first.size());
  const Eigen::Index cols = x_star.size();
  for (const auto& rec : first)
    out.k.push_back(rec.k);
  for (const auto& t : trajectories)
    if (t.records.size() != first.size())
      throw ValidationError("trajectories have different record layouts");

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& t : trajectories)
    for (Eigen::Index i = 0; i < rows; ++i)
      sum.row(i) += (t.records[static_cast<std::size_t>(i)].flat() - x_star).transpose();
  const double n = static_cast<double>(trajectories.size());
  out.mean = sum / n;

  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& t : trajectories)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Eigen::RowVectorXd d =
        (t.records[static_cast<std::size_t>(i)].flat() - x_star).transpose() - out.mean.row(i);
      sq.row(i) += d.cwiseProduct(d);
    }
  out.stddev = (sq / n).cwiseSqrt();
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config)
{
  config.validate();
  const ChanceConstrainedProblem problem = make_problem(config.problem);
  const IterateState initial = config.initial.value_or(default_initial_state(problem));

  ExperimentResult result;
  result.seeds = config.seed_list();
  result.x_star = reference_solution(problem).flat();

  const std::size_t n_seeds = result.seeds.size();
  const std::size_t n_tasks = n_seeds * config.variants.size();
  std::vector<std::optional<Trajectory>> slots(n_tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      const auto& variant = config.variants[t / n_seeds];
      RunConfig rc;
      rc.estimator = variant.estimator;
      rc.schedules = variant.tuning.schedules(variant.estimator.kind);
      rc.initial = initial;
      rc.iterations = config.iterations;
      rc.record_stride = config.effective_stride();
      rc.seed = result.seeds[t % n_seeds];
      rc.lambda_cap = config.lambda_cap;
      try {
        slots[t] = run(problem, rc);
      } catch (const DivergenceError&) {
        // left empty: counted as diverged
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };

  const unsigned n_workers =
    static_cast<unsigned>(std::min<std::size_t>(config.workers, std::max<std::size_t>(n_tasks, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_workers; ++i)
      pool.emplace_back(worker);
    worker();
  }
  if (failure)
    std::rethrow_exception(failure);

  const auto names = coordinate_names(problem);
  for (std::size_t v = 0; v < config.variants.size(); ++v) {
    VariantResult vr;
    std::vector<std::uint64_t> diverged;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      auto& slot = slots[v * n_seeds + s];
      if (slot)
        vr.trajectories.push_back(std::move(*slot));
      else
        diverged.push_back(result.seeds[s]);
    }
    vr.series = aggregate(config.variants[v].label, names, vr.trajectories, result.x_star);
    vr.series.diverged_seeds = std::move(diverged);
    result.variants.push_back(std::move(vr));
  }
  return result;
}

namespace {

std::string format_value(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path)
{
  std::error_code ec;
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
  out.flush();
  if (!out)
    throw IoError("failed writing '" + path.string() + "'");
}

} // namespace

void emit_csv(const AggregateSeries& series, const std::filesystem::path& path)
{
  std::ofstream out = open_output(path);
  out << "k";
  for (const auto& n : series.names)
    out << ",mean_" << n << ",std_" << n;
  out << '\n';
  for (std::size_t i = 0; i < series.k.size(); ++i) {
    out << series.k[i];
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < series.mean.cols(); ++j)
      out << ',' << format_value(series.mean(r, j)) << ',' << format_value(series.stddev(r, j));
    out << '\n';
  }
  finish(out, path);
}

void emit_plot_script(const std::vector<PlotSource>& sources, const std::filesystem::path& path)
{
  if (sources.empty())
    throw ValidationError("plot script needs at least one series");
  const auto& names = sources.front().series->names;
  for (const auto& s : sources)
    if (s.series->names != names)
      throw ValidationError("plotted series have different coordinates");

  const std::size_t n = names.size();
  const std::size_t cols = n <= 1 ? 1 : 2;
  const std::size_t rows = (n + cols - 1) / cols;

  std::ofstream out = open_output(path);
  out << "set terminal pngcairo size " << 640 * cols << "," << 480 * rows << "\n";
  out << "set output '" << path.stem().string() << ".png'\n";
  out << "set datafile separator ','\n";
  out << "set key top right\n";
  out << "set style fill transparent solid 0.15 noborder\n";
  out << "set multiplot layout " << rows << "," << cols << "\n";
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t mc = 2 + 2 * j;
    const std::size_t sc = 3 + 2 * j;
    out << "set title 'error in " << names[j] << "'\n";
    out << "set xlabel 'k'\n";
    out << "plot \\\n";
    for (std::size_t s = 0; s < sources.size(); ++s) {
      const std::string file = sources[s].csv.generic_string();
      const int dash = s == 0 ? 1 : 2;
      const std::size_t color = s + 1;
      out << "  '" << file << "' using 1:($" << mc << "-$" << sc << "):($" << mc << "+$" << sc
          << ") with filledcurves lc " << color << " notitle, \\\n";
      out << "  '" << file << "' using 1:" << mc << " with lines lc " << color << " dt " << dash
          << " title '" << sources[s].series->label << "'";
      out << (s + 1 < sources.size() ? ", \\\n" : "\n");
    }
  }
  out << "unset multiplot\n";
  finish(out, path);
}

void emit_bias_variance_csv(const std::vector<BiasVarianceReport>& reports,
                            const std::filesystem::path& path)
{
  std::ofstream out = open_output(path);
  const Eigen::Index n = reports.empty() ? 0 : reports.front().mean.size();
  out << "smoothing";
  for (const char* col : {"mean", "var", "bias"})
    for (Eigen::Index j = 0; j < n; ++j)
      out << ',' << col << '_' << j;
  out << ",mqe\n";
  for (const auto& r : reports) {
    out << format_value(r.smoothing);
    for (const Vector* v : {&r.mean, &r.variance, &r.bias})
      for (Eigen::Index j = 0; j < n; ++j)
        out << ',' << format_value((*v)[j]);
    out << ',' << format_value(r.mqe) << '\n';
  }
  finish(out, path);
}

void emit_trajectory_csv(const Trajectory& trajectory, const std::vector<std::string>& names,
                         const std::filesystem::path& path)
{
  std::ofstream out = open_output(path);
  out << "k";
  for (const auto& n : names)
    out << ',' << n;
  out << '\n';
  for (const auto& rec : trajectory.records) {
    out << rec.k;
    const Vector x = rec.flat();
    for (Eigen::Index j = 0; j < x.size(); ++j)
      out << ',' << format_value(x[j]);
    out << '\n';
  }
  finish(out, path);
}

} // namespace ccsa
