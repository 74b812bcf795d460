#include <ccsa/analysis.hpp>
#include <ccsa/harness.hpp>
#include <ccsa/kernels.hpp>
#include <ccsa/solver.hpp>

#include <benchmark/benchmark.h>

using namespace ccsa;

namespace {

EstimatorConfig estimator_for(int kind)
{
  return kind == 0 ? EstimatorConfig::ac(1.0) : EstimatorConfig::fd(1.0);
}

void BM_Step(benchmark::State& st)
{
  const auto problem = make_portfolio_problem();
  const auto est = estimator_for(static_cast<int>(st.range(0)));
  const TuningConstants tuning;
  const auto schedules = tuning.schedules(est.kind);
  NoiseStream stream(1);
  IterateState s = default_initial_state(problem);
  for (auto _ : st) {
    s = arrow_hurwicz_step(s, problem, est, schedules, stream, kInfinity);
    if (s.k > 100000)
      s = default_initial_state(problem);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1)->ArgName("fd");

void BM_Run5000(benchmark::State& st)
{
  const auto problem = make_portfolio_problem();
  RunConfig rc;
  rc.estimator = estimator_for(static_cast<int>(st.range(0)));
  rc.schedules = TuningConstants{}.schedules(rc.estimator.kind);
  rc.initial = default_initial_state(problem);
  rc.record_stride = 100;
  for (auto _ : st)
    benchmark::DoNotOptimize(run(problem, rc));
}
BENCHMARK(BM_Run5000)->Arg(0)->Arg(1)->ArgName("fd")->Unit(benchmark::kMillisecond);

void BM_BiasVarianceOracle(benchmark::State& st)
{
  const auto problem = make_portfolio_problem();
  const auto est = estimator_for(static_cast<int>(st.range(0)));
  const Vector u{{0.0, 0.50407}};
  for (auto _ : st)
    benchmark::DoNotOptimize(bias_variance_oracle(problem, est, u, 0.1));
}
BENCHMARK(BM_BiasVarianceOracle)->Arg(0)->Arg(1)->ArgName("fd")->Unit(benchmark::kMicrosecond);

void BM_KernelCumulative(benchmark::State& st)
{
  const auto kernels = builtin_kernels();
  double x = -1.0;
  for (auto _ : st) {
    for (const auto& k : kernels)
      benchmark::DoNotOptimize(k.cumulative(x));
    x = x > 1.0 ? -1.0 : x + 1e-3;
  }
}
BENCHMARK(BM_KernelCumulative);

void BM_Linearize(benchmark::State& st)
{
  const auto problem = make_portfolio_problem();
  const auto x = reference_solution(problem);
  for (auto _ : st)
    benchmark::DoNotOptimize(linearize(problem, x.u, x.lambda, {0, 1, 3}));
}
BENCHMARK(BM_Linearize)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
