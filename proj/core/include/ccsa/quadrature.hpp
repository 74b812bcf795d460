#pragma once

#include "ccsa/problem.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace ccsa {

using ScalarFunction = std::function<double(double)>;

struct QuadratureOptions
{
  double tolerance = 1e-12;    // relative, per piece
  unsigned max_depth = 20;     // adaptive bisection depth
  std::size_t scan_points = 512; // grid used to bracket breakpoints
};

/// Adaptive 61-point Gauss-Kronrod on [a, b].
double integrate_adaptive(const ScalarFunction& f, double a, double b,
                          const QuadratureOptions& options = {});

/// Splits [a, b] at the given points (unsorted, out-of-range ones dropped)
/// and integrates each smooth piece separately.
double integrate_piecewise(const ScalarFunction& f, double a, double b,
                           std::vector<double> breakpoints,
                           const QuadratureOptions& options = {});

/// Composite 20-point Gauss-Legendre with `panels` equal panels.
double gauss_legendre(const ScalarFunction& f, double a, double b, std::size_t panels = 64);

/// Sign changes of g on a uniform grid of `grid` cells, refined by bracketing
/// root search. Exact zeros at grid nodes are included once.
std::vector<double> find_roots(const ScalarFunction& g, double a, double b, std::size_t grid);

/// E[f(xi)] under the problem noise, split at `breakpoints` and at the
/// interior kinks of the density.
double noise_expectation(const NoiseModel& noise, const ScalarFunction& f,
                         std::vector<double> breakpoints, const QuadratureOptions& options = {});

/// xi values inside the noise support where theta(u, xi) - alpha == offset.
std::vector<double> constraint_crossings(const ChanceConstrainedProblem& problem,
                                         const Vector& u, double offset,
                                         const QuadratureOptions& options = {});

} // namespace ccsa
