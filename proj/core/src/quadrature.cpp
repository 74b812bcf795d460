#include "ccsa/quadrature.hpp"

#include "ccsa/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace ccsa {

double integrate_adaptive(const ScalarFunction& f, double a, double b,
                          const QuadratureOptions& options)
{
  if (!(a < b))
    return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
    f, a, b, options.max_depth, options.tolerance, &error);
}

double integrate_piecewise(const ScalarFunction& f, double a, double b,
                           std::vector<double> breakpoints, const QuadratureOptions& options)
{
  if (!(a < b))
    return 0.0;
  std::erase_if(breakpoints, [&](double p) { return !(p > a && p < b); });
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  double total = 0.0;
  double left = a;
  for (double p : breakpoints) {
    total += integrate_adaptive(f, left, p, options);
    left = p;
  }
  total += integrate_adaptive(f, left, b, options);
  return total;
}

double gauss_legendre(const ScalarFunction& f, double a, double b, std::size_t panels)
{
  if (panels == 0)
    throw ValidationError("gauss_legendre needs at least one panel");
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + width * static_cast<double>(i);
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + width);
  }
  return total;
}

std::vector<double> find_roots(const ScalarFunction& g, double a, double b, std::size_t grid)
{
  if (grid == 0)
    throw ValidationError("root scan needs a positive grid size");
  std::vector<double> roots;
  const double width = (b - a) / static_cast<double>(grid);
  double x0 = a;
  double g0 = g(x0);
  if (g0 == 0.0)
    roots.push_back(x0);
  for (std::size_t i = 1; i <= grid; ++i) {
    const double x1 = i == grid ? b : a + width * static_cast<double>(i);
    const double g1 = g(x1);
    if (g1 == 0.0) {
      roots.push_back(x1);
    } else if (g0 != 0.0 && std::signbit(g0) != std::signbit(g1)) {
      std::uintmax_t iterations = 200;
      const auto bracket = boost::math::tools::toms748_solve(
        g, x0, x1, g0, g1, boost::math::tools::eps_tolerance<double>(52), iterations);
      roots.push_back(0.5 * (bracket.first + bracket.second));
    }
    x0 = x1;
    g0 = g1;
  }
  return roots;
}

double noise_expectation(const NoiseModel& noise, const ScalarFunction& f,
                         std::vector<double> breakpoints, const QuadratureOptions& options)
{
  const auto [lo, hi] = noise.support();
  if (noise.kind == NoiseKind::gaussian)
    breakpoints.push_back(noise.center);
  return integrate_piecewise([&](double xi) { return f(xi) * noise.density(xi); }, lo, hi,
                             std::move(breakpoints), options);
}

std::vector<double> constraint_crossings(const ChanceConstrainedProblem& problem,
                                         const Vector& u, double offset,
                                         const QuadratureOptions& options)
{
  const auto [lo, hi] = problem.noise.support();
  return find_roots(
    [&](double xi) { return problem.constraint(u, xi) - problem.threshold - offset; }, lo, hi,
    options.scan_points);
}

} // namespace ccsa
