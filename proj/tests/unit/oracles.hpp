#pragma once

// Reference computations written independently of the library, used to pin
// values in the unit tests.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000)
{
  if (!(a < b))
    return 0.0;
  if (n % 2)
    ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i)
    s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Simpson on each piece between sorted cut points.
inline double simpson_pieces(const std::function<double(double)>& f, std::vector<double> cuts,
                             int n = 2000)
{
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += simpson(f, cuts[i], cuts[i + 1], n);
  return total;
}

// Portfolio data: l = 0.15, b = 0.2, xi ~ quintic(0.4, 3).
inline constexpr double kL = 0.15;
inline constexpr double kB = 0.2;
inline constexpr double kXiBar = 0.4;
inline constexpr double kSigma = 3.0;

inline double quintic_pdf(double x)
{
  const double t = (x - kXiBar) / kSigma;
  return std::abs(t) < 1.0 ? 15.0 * (1.0 - t * t) * (1.0 - t * t) / (16.0 * kSigma) : 0.0;
}

/// P((1+b)u + (1+xi)v >= 1+l) by integrating the density, v > 0.
inline double portfolio_probability(double u, double v)
{
  const double s = (1.0 + kL - (1.0 + kB) * u) / v - 1.0;
  const double lo = std::max(s, kXiBar - kSigma);
  return simpson(quintic_pdf, lo, kXiBar + kSigma, 20000);
}

inline double parabolic(double x)
{
  return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
}

inline double normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Bisection on the normal cdf.
inline double normal_quantile(double p)
{
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace oracle
