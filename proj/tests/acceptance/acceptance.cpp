// Acceptance run: one PASS/FAIL line per criterion.
//   ccsa_acceptance [criterion...]

#include <ccsa/analysis.hpp>
#include <ccsa/estimators.hpp>
#include <ccsa/harness.hpp>
#include <ccsa/kernels.hpp>
#include <ccsa/problem.hpp>
#include <ccsa/schedules.hpp>
#include <ccsa/solver.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace ccsa;

namespace {

struct Outcome
{
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double x, double target, double tol)
{
  return std::abs(x - target) <= tol;
}

double round4(double x)
{
  return std::round(x * 1e4) / 1e4;
}

const Vector kOptimum{{0.0, 0.50407}};

Outcome kernel_table()
{
  struct Row
  {
    const char* name;
    double sigma2, l2, score;
  };
  const std::array<Row, 6> table{{{"uniform", 0.3333, 0.5000, 0.3701},
                                  {"triangular", 0.1667, 0.6667, 0.3531},
                                  {"cosine", 0.1894, 0.6169, 0.3492},
                                  {"parabolic", 0.2000, 0.6000, 0.3491},
                                  {"quartic", 0.1429, 0.7143, 0.3508},
                                  {"sextic", 0.1111, 0.8159, 0.3529}}};
  bool ok = true;
  std::string worst;
  for (const auto& row : table) {
    const auto k = kernel_by_name(row.name);
    const bool match = round4(k.sigma2()) == row.sigma2 && round4(k.l2norm2()) == row.l2 &&
                       round4(kernel_score(k)) == row.score;
    if (!match) {
      ok = false;
      worst += fmt(" %s(%.4f/%.4f/%.4f)", row.name, k.sigma2(), k.l2norm2(), kernel_score(k));
    }
  }
  const auto p = kernel_by_name("parabolic");
  return {ok, fmt("parabolic %.4f/%.4f/%.4f", p.sigma2(), p.l2norm2(), kernel_score(p)) +
                (ok ? "" : " mismatches:" + worst)};
}

Outcome toy_kt()
{
  const auto s = solve_toy_deterministic(0.7);
  return {within(s.u, -2.05244, 1e-4) && within(s.lambda, 0.877913, 1e-4),
          fmt("u=%.6f lambda=%.6f", s.u, s.lambda)};
}

Outcome portfolio_optimum()
{
  const auto p = make_portfolio_problem();
  const double res = kt_residual(p, kOptimum, Vector{{0.0, 0.08815}}, 0.1, 0.1);
  const double prob = analytic_probability(p, kOptimum);
  return {res <= 1e-3 && within(prob, 0.24, 1e-3), fmt("kt residual=%.3g P=%.6f", res, prob)};
}

Outcome ac_moments()
{
  const auto p = make_portfolio_problem();
  bool ok = true;
  std::string d;
  for (double r : {0.1, 0.25, 0.5}) {
    const double m = bias_variance_oracle(p, EstimatorConfig::ac(r), kOptimum, r).mean[0];
    ok = ok && within(m, 0.62 - 0.096 * r * r, 5e-3);
    d += fmt("mean_u(%g)=%.6f ", r, m);
  }
  for (double r : {0.05, 0.1}) {
    const double vr = bias_variance_oracle(p, EstimatorConfig::ac(r), kOptimum, r).variance[0] * r;
    ok = ok && vr >= 0.40 && vr <= 0.50;
    d += fmt("var_u*r(%g)=%.4f ", r, vr);
  }
  d.pop_back();
  return {ok, d};
}

Outcome fd_moments()
{
  const auto p = make_portfolio_problem();
  bool ok = true;
  std::string d;
  for (double c : {0.1, 0.25}) {
    const double m = bias_variance_oracle(p, EstimatorConfig::fd(c), kOptimum, c).mean[0];
    ok = ok && within(m, 0.62 - 0.23 * c * c, 5e-3);
    d += fmt("mean_u(%g)=%.6f ", c, m);
  }
  for (double c : {0.05, 0.1}) {
    const auto rep = bias_variance_oracle(p, EstimatorConfig::fd(c), kOptimum, c);
    const double vu = rep.variance[0] * c;
    const double vv = rep.variance[1] * c;
    ok = ok && vu >= 0.28 && vu <= 0.34 && vv >= 0.53 && vv <= 0.65;
    d += fmt("var*c(%g)=(%.4f, %.4f) ", c, vu, vv);
  }
  d.pop_back();
  return {ok, d};
}

Outcome mqe_tuning()
{
  const auto p = make_portfolio_problem();
  const auto ac = fit_mqe_constants(p, EstimatorConfig::ac(1.0), kOptimum);
  const auto fd = fit_mqe_constants(p, EstimatorConfig::fd(1.0), kOptimum);
  const double rs = optimal_smoothing(ac.A, ac.B, 1.0).smoothing;
  const double rc = mqe_coefficient(ac.A, ac.B);
  const double cs = optimal_smoothing(fd.A, fd.B, 1.0).smoothing;
  const double cc = mqe_coefficient(fd.A, fd.B);
  return {within(rs, 1.30, 0.05) && within(rc, 1.98, 0.1) && within(cs, 0.63, 0.05) &&
            within(cc, 1.79, 0.1),
          fmt("AC r*=%.4f coef=%.4f  FD c*=%.4f coef=%.4f", rs, rc, cs, cc)};
}

Outcome rate_predictor()
{
  const Rational one(1);
  const bool conds = check_conditions_ac(one, Rational(2, 5)).pass;
  const auto ac = predict_rate(one, Rational(2, 5), EstimatorKind::ac);
  const auto h4 = optimal_tuning(EstimatorKind::fd, FdHypothesis::h4);
  const auto worst = predict_rate(one, Rational(1, 3), EstimatorKind::fd, FdHypothesis::none);
  const bool ok = conds && ac.kappa == Rational(4, 5) && h4.gamma == one &&
                  h4.beta == Rational(4, 11) && h4.kappa == Rational(8, 11) &&
                  worst.kappa == Rational(2, 3);
  return {ok, "AC kappa=" + ac.kappa.str() + " FD/H4 (" + h4.gamma.str() + ", " + h4.beta.str() +
                ") kappa=" + h4.kappa.str() + " FD worst kappa=" + worst.kappa.str()};
}

std::string spectrum(const LinearizationReport& r)
{
  std::string s;
  for (const auto& z : r.eigenvalues)
    s += fmt(" %.4f%+.4fi", z.real(), z.imag());
  return s;
}

Outcome linearization()
{
  const auto p = make_portfolio_problem();
  const auto x = reference_solution(p);
  const auto full = linearize(p, x.u, x.lambda, {0, 1, 3});
  const auto reduced = linearize(p, x.u, x.lambda, {1, 3});
  bool ok = full.eigenvalues.size() == 3 && reduced.eigenvalues.size() == 2;
  if (ok) {
    ok = within(full.eigenvalues[0].real(), 0.207, 0.01) &&
         within(full.eigenvalues[0].imag(), 0.0, 0.01);
    for (int i = 1; i < 3; ++i)
      ok = ok && within(full.eigenvalues[i].real(), 0.974, 0.01) &&
           within(std::abs(full.eigenvalues[i].imag()), 0.753, 0.01);
    for (const auto& z : reduced.eigenvalues)
      ok = ok && within(z.real(), 0.605, 0.01) && within(std::abs(z.imag()), 1.014, 0.01);
  }
  ok = ok && !full.stable_gamma_one && reduced.stable_gamma_one;
  return {ok, "full" + spectrum(full) + (full.stable_gamma_one ? " PASS" : " FAIL") + "; reduced" +
                spectrum(reduced) + (reduced.stable_gamma_one ? " PASS" : " FAIL")};
}

struct EndpointStats
{
  double dv = 0.0;
  double dl2 = 0.0;
  double at_bound = 0.0;
  std::size_t diverged = 0;
};

EndpointStats endpoints(const VariantResult& v)
{
  EndpointStats s;
  const double n = static_cast<double>(v.trajectories.size());
  for (const auto& t : v.trajectories) {
    s.dv += (t.terminal.u[1] - 0.50407) / n;
    s.dl2 += (t.terminal.lambda[1] - 0.08815) / n;
    s.at_bound += (t.terminal.u[0] == 0.0 ? 1.0 : 0.0) / n;
  }
  s.diverged = v.series.diverged_seeds.size();
  return s;
}

bool endpoints_ok(const EndpointStats& s)
{
  return s.diverged == 0 && std::abs(s.dv) <= 0.03 && std::abs(s.dl2) <= 0.03 &&
         s.at_bound >= 0.95;
}

Outcome desk_experiment()
{
  ExperimentConfig c;
  c.iterations = 5000;
  c.record_stride = 100;
  c.replications = 100;
  c.emit_plots = false;
  VariantConfig ac;
  ac.label = "AC";
  ac.estimator = EstimatorConfig::ac(1.0);
  ac.tuning.a = 2.5;
  VariantConfig fd;
  fd.label = "FD";
  fd.estimator = EstimatorConfig::fd(1.0);
  fd.tuning.b = 1.2;
  fd.tuning.d = 8.0;
  fd.tuning.e = 80.0;
  fd.tuning.f = 3.0;
  fd.tuning.g = 40.0;
  c.variants = {ac, fd};
  const auto r = run_experiment(c);

  const auto sa = endpoints(r.variants[0]);
  const auto sf = endpoints(r.variants[1]);
  double slope = 0.0;
  bool slope_ok = false;
  if (r.variants[0].trajectories.size() >= 30) {
    slope = clt_diagnostics(r.variants[0].trajectories, r.x_star, 0.8).mse_slope;
    slope_ok = slope >= -0.95 && slope <= -0.65;
  }
  const bool ok = endpoints_ok(sa) && slope_ok && endpoints_ok(sf);
  return {ok, fmt("AC dv=%+.4f dl2=%+.4f at0=%.2f slope=%.3f | FD dv=%+.4f dl2=%+.4f at0=%.2f "
                  "| diverged %zu/%zu",
                  sa.dv, sa.dl2, sa.at_bound, slope, sf.dv, sf.dl2, sf.at_bound, sa.diverged,
                  sf.diverged)};
}

Outcome pathology()
{
  const auto toy = make_toy_problem(0.7);
  const auto stuck = ode_integrate(toy, {Vector{{1.0}}, Vector{{1.0}}, 0}, 200.0, 0.01, 100);
  double drift = 0.0;
  for (const auto& x : stuck.states)
    drift = std::max(drift, std::abs(x[0] - 1.0));
  const double lam = stuck.terminal()[1];
  const auto good = ode_integrate(toy, {Vector{{-2.5}}, Vector{{1.0}}, 0}, 200.0, 0.01, 100);
  const double gu = good.terminal()[0];
  const double gl = good.terminal()[1];
  const bool ok = drift < 1e-6 && lam > 100.0 && within(gu, -2.05244, 1e-3) &&
                  within(gl, 0.877913, 1e-3);
  return {ok, fmt("from (1,1): max|u-1|=%.2g lambda=%.1f; from (-2.5,1): (%.6f, %.6f)", drift, lam,
                  gu, gl)};
}

Outcome indicator_unbiased()
{
  const auto p = make_portfolio_problem();
  double worst = 0.0;
  for (auto [u, v] : {std::pair{0.1, 0.5}, {0.3, 0.6}, {0.0, 0.9}, {0.5, 0.2}, {0.2, 0.3}}) {
    const Vector x{{u, v}};
    worst = std::max(worst, std::abs(indicator_mean(p, x) - analytic_probability(p, x)));
  }
  return {worst <= 1e-8, fmt("max error=%.3g", worst)};
}

} // namespace

int main(int argc, char** argv)
{
  const std::array<std::function<Outcome()>, 11> criteria{
    kernel_table,  toy_kt,        portfolio_optimum, ac_moments,
    fd_moments,    mqe_tuning,    rate_predictor,    linearization,
    desk_experiment, pathology,   indicator_unbiased};

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 11) {
      std::fprintf(stderr, "usage: %s [criterion 1-11 ...]\n", argv[0]);
      return 2;
    }
    selected.insert(n);
  }
  if (selected.empty())
    for (int n = 1; n <= 11; ++n)
      selected.insert(n);

  int failed = 0;
  for (int n : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d: %s  %s  [%.2fs]\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
