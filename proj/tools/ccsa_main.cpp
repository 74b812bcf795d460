// ccsa: command-line front end for the chance-constrained Arrow-Hurwicz solver.

#include <ccsa/analysis.hpp>
#include <ccsa/error.hpp>
#include <ccsa/harness.hpp>
#include <ccsa/kernels.hpp>
#include <ccsa/schedules.hpp>
#include <ccsa/solver.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ccsa;

namespace {

struct Globals
{
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::string> problem;
  std::optional<double> pi;
};

std::vector<double> parse_list(const std::string& text)
{
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "'");
    }
  }
  if (values.empty())
    throw ValidationError("expected a comma-separated list of numbers");
  return values;
}

Vector to_vector(const std::vector<double>& v)
{
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ProblemSpec problem_spec(const Globals& g, ProblemSpec spec = {})
{
  if (g.problem)
    spec.name = *g.problem;
  if (g.pi)
    spec.set_pi(*g.pi);
  return spec;
}

void print_state(const std::vector<std::string>& names, const Vector& x)
{
  for (Eigen::Index i = 0; i < x.size(); ++i)
    std::printf("%s%s = %.9g", i == 0 ? "" : "  ", names[static_cast<std::size_t>(i)].c_str(), x[i]);
  std::printf("\n");
}

EstimatorConfig default_estimator(const std::string& kind)
{
  const EstimatorKind k = parse_estimator_kind(kind);
  if (k == EstimatorKind::fd)
    return EstimatorConfig::fd(1.0);
  if (k == EstimatorKind::exact)
    return EstimatorConfig::exact();
  return EstimatorConfig::ac(1.0);
}

// --- solve ----------------------------------------------------------------

struct SolveArgs
{
  std::optional<std::string> estimator;
  std::optional<std::int64_t> iterations;
  std::optional<std::int64_t> stride;
};

int cmd_solve(const Globals& g, const SolveArgs& a)
{
  SolveConfig cfg = g.config ? load_solve_config(*g.config) : SolveConfig{};
  cfg.problem = problem_spec(g, cfg.problem);
  if (a.estimator) {
    cfg.variant.estimator = default_estimator(*a.estimator);
    cfg.variant.label = *a.estimator;
  }
  if (a.iterations)
    cfg.iterations = *a.iterations;
  if (a.stride)
    cfg.record_stride = *a.stride;
  if (g.seed)
    cfg.seed = *g.seed;

  const auto problem = make_problem(cfg.problem);
  const auto report = cfg.variant.tuning.check(cfg.variant.estimator.kind);
  for (const auto& v : report.violations)
    std::fprintf(stderr, "warning: convergence condition violated: %s\n", v.c_str());

  const Trajectory traj = run(problem, cfg.run_config(problem));
  const auto names = coordinate_names(problem);
  std::printf("problem %s, estimator %s, seed %llu, k = %lld\n", problem.name.c_str(),
              to_string(cfg.variant.estimator.kind), static_cast<unsigned long long>(traj.seed),
              static_cast<long long>(traj.terminal.k));
  print_state(names, traj.terminal.flat());
  if (g.out) {
    const fs::path path = fs::path(*g.out) / "trajectory.csv";
    emit_trajectory_csv(traj, names, path);
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

// --- experiment -----------------------------------------------------------

struct ExperimentArgs
{
  std::optional<std::size_t> replications;
  std::optional<std::int64_t> iterations;
  std::optional<unsigned> workers;
};

int cmd_experiment(const Globals& g, const ExperimentArgs& a)
{
  ExperimentConfig cfg;
  if (g.config) {
    cfg = load_experiment_config(*g.config);
  } else {
    VariantConfig fd;
    fd.label = "FD";
    fd.estimator = EstimatorConfig::fd(1.0);
    cfg.variants.push_back(fd);
  }
  cfg.problem = problem_spec(g, cfg.problem);
  if (a.replications) {
    cfg.replications = *a.replications;
    cfg.seeds.clear();
  }
  if (a.iterations)
    cfg.iterations = *a.iterations;
  if (a.workers)
    cfg.workers = *a.workers;
  if (g.seed) {
    cfg.base_seed = *g.seed;
    cfg.seeds.clear();
  }
  if (g.out)
    cfg.output_dir = *g.out;

  for (const auto& v : cfg.variants)
    for (const auto& msg : v.tuning.check(v.estimator.kind).violations)
      std::fprintf(stderr, "warning: %s: convergence condition violated: %s\n", v.label.c_str(),
                   msg.c_str());

  const ExperimentResult result = run_experiment(cfg);
  const auto& names = result.variants.front().series.names;
  std::printf("reference point: ");
  print_state(names, result.x_star);

  std::vector<fs::path> csvs;
  for (const auto& v : result.variants) {
    const auto& s = v.series;
    std::printf("%s: %zu replications, %zu diverged\n", s.label.c_str(), s.replications,
                s.diverged_seeds.size());
    if (s.k.empty())
      continue;
    const auto last = static_cast<Eigen::Index>(s.k.size() - 1);
    std::printf("  terminal error (k = %lld):", static_cast<long long>(s.k.back()));
    for (Eigen::Index j = 0; j < s.mean.cols(); ++j)
      std::printf("  %s %.4g +- %.4g", names[static_cast<std::size_t>(j)].c_str(),
                  s.mean(last, j), s.stddev(last, j));
    std::printf("\n");
    const fs::path csv = cfg.output_dir / (s.label + ".csv");
    emit_csv(s, csv);
    csvs.push_back(csv);
    std::printf("  wrote %s\n", csv.string().c_str());
  }
  if (cfg.emit_plots) {
    std::vector<PlotSource> sources;
    for (std::size_t i = 0; i < result.variants.size(); ++i)
      if (!result.variants[i].series.k.empty())
        sources.push_back({&result.variants[i].series, csvs[i].filename()});
    if (!sources.empty()) {
      const fs::path script = cfg.output_dir / "errors.gp";
      emit_plot_script(sources, script);
      std::printf("wrote %s\n", script.string().c_str());
    }
  }
  return 0;
}

// --- tune -----------------------------------------------------------------

struct TuneArgs
{
  std::string estimator = "ac";
  std::string hypothesis = "H3";
  bool fit = false;
};

int cmd_tune(const Globals& g, const TuneArgs& a)
{
  const EstimatorKind kind = parse_estimator_kind(a.estimator);
  if (kind == EstimatorKind::exact)
    throw ValidationError("tune applies to the ac and fd estimators");
  const FdHypothesis h = parse_hypothesis(a.hypothesis);
  const RateTuning t = optimal_tuning(kind, h);
  std::printf("estimator %s%s\n", to_string(kind),
              kind == EstimatorKind::fd ? (std::string(", hypothesis ") + to_string(h)).c_str() : "");
  std::printf("beta = %s (%g)\n", t.beta.str().c_str(), t.beta.to_double());
  std::printf("gamma = %s (%g)\n", t.gamma.str().c_str(), t.gamma.to_double());
  std::printf("delta = %s (%g)\n", t.delta.str().c_str(), t.delta.to_double());
  std::printf("kappa = %s (%g)\n", t.kappa.str().c_str(), t.kappa.to_double());

  TuningConstants c;
  if (g.config) {
    const SolveConfig sc = load_solve_config(*g.config);
    c = sc.variant.tuning;
  }
  std::printf("smoothing exponent = %g\n", 0.5 * t.beta.to_double());
  std::printf("schedule constants: a = %g  b = %g  d = %g  e = %g  f = %g  g = %g\n", c.a, c.b,
              c.d, c.e, c.f, c.g);

  if (a.fit) {
    const auto problem = make_problem(problem_spec(g));
    const IterateState ref = reference_solution(problem);
    const EstimatorConfig est =
      kind == EstimatorKind::ac ? EstimatorConfig::ac(1.0) : EstimatorConfig::fd(1.0);
    const MqeConstants m = fit_mqe_constants(problem, est, ref.u);
    const SmoothingOptimum opt = optimal_smoothing(m.A, m.B, 1.0);
    std::printf("mqe fit at the reference point: A = %.6g  B = %.6g\n", m.A, m.B);
    std::printf("optimal smoothing = %.4f N^(-1/5), mqe = %.4f / N^(4/5)\n", opt.smoothing,
                opt.mqe);
  }
  return 0;
}

// --- bias-variance --------------------------------------------------------

struct BiasVarianceArgs
{
  std::string estimator = "ac";
  std::string kernel = "parabolic";
  std::string values = "0.05,0.1,0.25,0.5";
  std::optional<std::string> point;
  double samples = 1.0;
};

int cmd_bias_variance(const Globals& g, const BiasVarianceArgs& a)
{
  const auto problem = make_problem(problem_spec(g));
  EstimatorConfig est = default_estimator(a.estimator);
  est.kernel = kernel_by_name(a.kernel);
  const Vector u = a.point ? to_vector(parse_list(*a.point)) : reference_solution(problem).u;
  if (u.size() != problem.dim_u)
    throw ValidationError("--point needs " + std::to_string(problem.dim_u) + " coordinates");

  std::vector<BiasVarianceReport> reports;
  for (double s : parse_list(a.values))
    reports.push_back(bias_variance_oracle(problem, est, u, s, a.samples));

  std::printf("%-10s", "smoothing");
  for (Eigen::Index j = 0; j < u.size(); ++j)
    std::printf(" %12s %12s %12s", ("mean_" + std::to_string(j)).c_str(),
                ("var_" + std::to_string(j)).c_str(), ("bias_" + std::to_string(j)).c_str());
  std::printf(" %12s\n", "mqe");
  for (const auto& r : reports) {
    std::printf("%-10g", r.smoothing);
    for (Eigen::Index j = 0; j < u.size(); ++j)
      std::printf(" %12.6g %12.6g %12.6g", r.mean[j], r.variance[j], r.bias[j]);
    std::printf(" %12.6g\n", r.mqe);
  }
  if (g.out) {
    const fs::path path = fs::path(*g.out) / "bias_variance.csv";
    emit_bias_variance_csv(reports, path);
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

// --- kt-check -------------------------------------------------------------

struct KtArgs
{
  std::optional<std::string> point;
  double eps = 0.1;
  double rho = 0.1;
};

int cmd_kt_check(const Globals& g, const KtArgs& a)
{
  const auto problem = make_problem(problem_spec(g));
  Vector x;
  if (a.point) {
    x = to_vector(parse_list(*a.point));
  } else if (problem.name == "toy") {
    const auto s = solve_toy_deterministic(problem_spec(g).toy);
    x = Vector{{s.u, s.lambda}};
  } else {
    x = reference_solution(problem).flat();
  }
  if (x.size() != problem.dim_u + problem.dim_lambda())
    throw ValidationError("--point needs " + std::to_string(problem.dim_u + problem.dim_lambda()) +
                          " coordinates (primal then multipliers)");
  const Vector u = x.head(problem.dim_u);
  const Vector lambda = x.tail(problem.dim_lambda());
  print_state(coordinate_names(problem), x);
  std::printf("kt residual = %.6e\n", kt_residual(problem, u, lambda, a.eps, a.rho));
  std::printf("P(u) = %.9g  (level %.9g)\n", analytic_probability(problem, u), problem.prob_level);
  return 0;
}

// --- field ----------------------------------------------------------------

struct FieldArgs
{
  std::string from = "1.0,1.0";
  double horizon = 200.0;
  double dt = 0.01;
  std::size_t grid = 21;
};

int cmd_field(const Globals& g, const FieldArgs& a)
{
  ProblemSpec spec;
  spec.name = "toy";
  spec = problem_spec(g, spec);
  const auto problem = make_problem(spec);
  if (problem.dim_u != 1 || problem.dim_lambda() != 1)
    throw ValidationError("field study expects a scalar problem with one multiplier");

  const auto start = parse_list(a.from);
  if (start.size() != 2)
    throw ValidationError("--from needs u,lambda");
  const OdePath path = ode_integrate(problem, IterateState{Vector{{start[0]}}, Vector{{start[1]}}, 0},
                                     a.horizon, a.dt, 100);
  const auto sharp = solve_toy_deterministic(spec.toy);
  std::printf("KT point: u = %.6f  lambda = %.6f\n", sharp.u, sharp.lambda);
  std::printf("ode from (%g, %g) to T = %g: u = %.9g  lambda = %.9g\n", start[0], start[1],
              a.horizon, path.terminal()[0], path.terminal()[1]);

  if (g.out) {
    const fs::path dir = *g.out;
    fs::create_directories(dir);
    {
      std::ofstream out(dir / "ode.csv", std::ios::binary);
      out << "t,u,lambda\n";
      for (std::size_t i = 0; i < path.times.size(); ++i)
        out << path.times[i] << ',' << path.states[i][0] << ',' << path.states[i][1] << '\n';
      if (!out)
        throw IoError("failed writing ode.csv");
    }
    std::ofstream out(dir / "field.csv", std::ios::binary);
    out << "u,lambda,du,dlambda\n";
    const std::size_t n = std::max<std::size_t>(a.grid, 2);
    const double u0 = sharp.u - 1.0;
    const double u1 = 1.5;
    const double l1 = 3.0 * sharp.lambda;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double u = u0 + (u1 - u0) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double l = l1 * static_cast<double>(j) / static_cast<double>(n - 1);
        const Vector f = mean_field(problem, Vector{{u}}, Vector{{l}});
        out << u << ',' << l << ',' << f[0] << ',' << f[1] << '\n';
      }
    if (!out)
      throw IoError("failed writing field.csv");
    std::printf("wrote %s and %s\n", (dir / "ode.csv").string().c_str(),
                (dir / "field.csv").string().c_str());
  }
  return 0;
}

// --- kernels --------------------------------------------------------------

int cmd_kernels()
{
  std::printf("%-12s %10s %10s %10s %10s\n", "kernel", "h(0)", "sigma^2", "||h||^2", "score");
  for (const auto& k : builtin_kernels())
    std::printf("%-12s %10.4f %10.4f %10.4f %10.4f\n", k.name().c_str(), k.peak(), k.sigma2(),
                k.l2norm2(), kernel_score(k));
  std::printf("best: %s\n", best_kernel().name().c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Stochastic Arrow-Hurwicz for chance-constrained problems"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--problem", g.problem, "Problem name (portfolio, toy)");
  app.add_option("--pi", g.pi, "Probability level override");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Single stochastic run");
  solve->add_option("--estimator", solve_args.estimator, "ac, fd or exact");
  solve->add_option("--iterations", solve_args.iterations, "Iteration count K");
  solve->add_option("--stride", solve_args.stride, "Record stride");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Replicated runs with matched seeds");
  experiment->add_option("--replications", exp_args.replications, "Runs per variant");
  experiment->add_option("--iterations", exp_args.iterations, "Iteration count K");
  experiment->add_option("--workers", exp_args.workers, "Parallel workers");

  TuneArgs tune_args;
  auto* tune = app.add_subcommand("tune", "Optimal exponents and schedule constants");
  tune->add_option("--estimator", tune_args.estimator, "ac or fd");
  tune->add_option("--hypothesis", tune_args.hypothesis, "H3, H4 or none");
  tune->add_flag("--fit", tune_args.fit, "Fit the MQE constants by quadrature");

  BiasVarianceArgs bv_args;
  auto* bv = app.add_subcommand("bias-variance", "Exact estimator moments over smoothing values");
  bv->add_option("--estimator", bv_args.estimator, "ac or fd");
  bv->add_option("--kernel", bv_args.kernel, "Mollifier kernel");
  bv->add_option("--values", bv_args.values, "Comma-separated smoothing values");
  bv->add_option("--point", bv_args.point, "Primal point, comma-separated");
  bv->add_option("--samples", bv_args.samples, "N in the mqe");

  KtArgs kt_args;
  auto* kt = app.add_subcommand("kt-check", "KT residual at a point");
  kt->add_option("--point", kt_args.point, "Primal then multipliers, comma-separated");
  kt->add_option("--eps", kt_args.eps, "Primal step");
  kt->add_option("--rho", kt_args.rho, "Dual step");

  FieldArgs field_args;
  auto* field = app.add_subcommand("field", "Mean field and ODE study of the toy problem");
  field->add_option("--from", field_args.from, "Start u,lambda");
  field->add_option("--horizon", field_args.horizon, "Integration horizon");
  field->add_option("--dt", field_args.dt, "RK4 step");
  field->add_option("--grid", field_args.grid, "Field grid points per axis");

  auto* kernels = app.add_subcommand("kernels", "Kernel constants table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed())
      return cmd_solve(g, solve_args);
    if (experiment->parsed())
      return cmd_experiment(g, exp_args);
    if (tune->parsed())
      return cmd_tune(g, tune_args);
    if (bv->parsed())
      return cmd_bias_variance(g, bv_args);
    if (kt->parsed())
      return cmd_kt_check(g, kt_args);
    if (field->parsed())
      return cmd_field(g, field_args);
    if (kernels->parsed())
      return cmd_kernels();
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return 1;
  }
  return 1;
}
