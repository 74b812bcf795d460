#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace ccsa {

using Vector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

//! Componentwise bounds; entries may be infinite.
struct AdmissibleBox
{
  Vector lower;
  Vector upper;

  static AdmissibleBox unbounded(Eigen::Index dim);
  static AdmissibleBox cube(Eigen::Index dim, double lo, double hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Vector& x) const;
  void validate() const;
};

/// Euclidean projection onto the box (componentwise clamp).
Vector project_admissible(const Vector& x, const AdmissibleBox& box);

/// Projection onto the nonnegative cone, optionally capped at `cap`.
Vector project_dual(const Vector& lambda, double cap = kInfinity);

// Quintic-polynomial distribution supported on [center - scale, center + scale].
double quintic_cdf(double x, double center, double scale);
double quintic_density(double x, double center, double scale);
/// Inverse of quintic_cdf by bisection, absolute tolerance 1e-12.
double quintic_quantile(double p, double center, double scale);

enum class NoiseKind
{
  quintic,
  gaussian
};

struct NoiseModel
{
  NoiseKind kind = NoiseKind::quintic;
  double center = 0.0; // xi_bar for quintic, mean for gaussian
  double scale = 1.0;  // sigma for quintic, stddev for gaussian

  static NoiseModel quintic(double xi_bar, double sigma);
  static NoiseModel gaussian(double mean, double stddev);

  double cdf(double x) const;
  double density(double x) const;
  double mean() const { return center; }
  /// Interval carrying all of the mass up to double precision.
  std::pair<double, double> support() const;
  void validate() const;
};

//! Seeded generator state; one per worker.
class NoiseStream
{
public:
  explicit NoiseStream(std::uint64_t seed);

  double uniform();
  double standard_normal();
  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

double sample_noise(const NoiseModel& model, NoiseStream& stream);

/// Dualized deterministic constraint coeffs . u <= bound.
struct LinearConstraint
{
  Vector coeffs;
  double bound = 0.0;
};

//! Closed-form expectations, available for the built-in instances.
struct AnalyticOracles
{
  std::function<double(const Vector&)> probability;
  std::function<Vector(const Vector&)> probability_gradient;
  std::function<Vector(const Vector&)> expected_cost_gradient;
};

/// min E j(u, xi)  s.t.  P(theta(u, xi) <= alpha) >= pi,  linear rows,  u in box.
struct ChanceConstrainedProblem
{
  std::string name;
  Eigen::Index dim_u = 0;

  std::function<double(const Vector&, double)> cost;
  std::function<Vector(const Vector&, double)> cost_grad;
  std::function<double(const Vector&, double)> constraint;
  std::function<Vector(const Vector&, double)> constraint_grad;

  double threshold = 0.0;
  double prob_level = 0.5;

  std::vector<LinearConstraint> linear_dualized;
  AdmissibleBox admissible;
  NoiseModel noise;

  std::vector<std::string> primal_names;
  std::optional<AnalyticOracles> oracles;

  /// Multipliers are ordered: linear rows first, probability constraint last.
  Eigen::Index dim_lambda() const
  {
    return static_cast<Eigen::Index>(linear_dualized.size()) + 1;
  }
  Eigen::Index prob_multiplier_index() const { return dim_lambda() - 1; }
  std::vector<std::string> dual_names() const;

  void validate() const;
};

struct PortfolioParams
{
  double l = 0.15;
  double b = 0.2;
  double xi_bar = 0.4;
  double sigma = 3.0;
  double pi = 0.24;
};

ChanceConstrainedProblem make_portfolio_problem(const PortfolioParams& params = {});

struct ToyParams
{
  double pi = 0.7;
  double mean = -2.0;
  double stddev = 0.1;
};

ChanceConstrainedProblem make_toy_problem(const ToyParams& params = {});
inline ChanceConstrainedProblem make_toy_problem(double pi)
{
  return make_toy_problem(ToyParams{pi});
}

double analytic_probability(const ChanceConstrainedProblem& problem, const Vector& u);
Vector analytic_probability_gradient(const ChanceConstrainedProblem& problem,
                                     const Vector& u);
Vector expected_cost_gradient(const ChanceConstrainedProblem& problem, const Vector& u);

} // namespace ccsa
