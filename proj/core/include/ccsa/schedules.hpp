#pragma once

#include "ccsa/estimators.hpp"

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ccsa {

//! Exact rational number for exponent arithmetic.
class Rational
{
public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1)
    : num_(num)
    , den_(den)
  {
    normalize();
  }

  /// Parses "p/q" or an integer.
  static Rational parse(std::string_view text);

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend constexpr Rational operator+(Rational a, Rational b)
  {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator-(Rational a, Rational b)
  {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator*(Rational a, Rational b)
  {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend constexpr Rational operator/(Rational a, Rational b)
  {
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  constexpr Rational operator-() const { return {-num_, den_}; }

  friend constexpr bool operator==(Rational a, Rational b)
  {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend constexpr std::strong_ordering operator<=>(Rational a, Rational b)
  {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  friend std::ostream& operator<<(std::ostream& os, Rational r) { return os << r.str(); }

private:
  constexpr void normalize();

  std::int64_t num_;
  std::int64_t den_;
};

constexpr void Rational::normalize()
{
  if (den_ == 0) {
    num_ = num_ >= 0 ? 1 : -1;
    den_ = 1;
  }
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  std::int64_t a = num_ < 0 ? -num_ : num_;
  std::int64_t b = den_;
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num_ /= a;
    den_ /= a;
  }
}

/// Regularity hypothesis on theta(u, .) at the constraint boundary, which
/// fixes how fast the FD variance blows up as c -> 0.
enum class FdHypothesis
{
  h3,  // O(1/c)
  h4,  // O(c^{-3/2})
  none // O(c^{-2})
};

const char* to_string(FdHypothesis h) noexcept;
FdHypothesis parse_hypothesis(std::string_view text);

struct ConditionReport
{
  bool pass = true;
  std::vector<std::string> violations;

  explicit operator bool() const { return pass; }
};

/// gamma <= 1, beta + gamma > 1, 2 gamma - beta/2 > 1.
ConditionReport check_conditions_ac(Rational gamma, Rational beta);
/// Same first two, third depends on the hypothesis.
ConditionReport check_conditions_fd(Rational gamma, Rational beta, FdHypothesis hypothesis);

// Floating variants compare with 1e-12 slack.
ConditionReport check_conditions_ac(double gamma, double beta);
ConditionReport check_conditions_fd(double gamma, double beta, FdHypothesis hypothesis);

struct RateTuning
{
  Rational gamma;
  Rational beta;
  Rational delta; // variance exponent: V^k = O(k^{-delta})
  Rational kappa; // E|x^k - x*|^2 = O(k^{-kappa})
};

/// delta = -m * beta; returns m for the estimator/hypothesis pair.
Rational variance_growth(EstimatorKind kind, FdHypothesis hypothesis);

/// kappa = min(2 beta, gamma + delta). Throws ValidationError if the
/// convergence conditions fail.
RateTuning predict_rate(Rational gamma, Rational beta, EstimatorKind kind,
                        FdHypothesis hypothesis = FdHypothesis::h3);

/// Maximizes kappa: gamma = 1 and beta balancing 2 beta = gamma + delta.
RateTuning optimal_tuning(EstimatorKind kind, FdHypothesis hypothesis = FdHypothesis::h3);

/// numerator / (offset + k)^exponent
struct StepSchedule
{
  double numerator = 1.0;
  double offset = 0.0;
  double exponent = 1.0;

  double at(std::int64_t k) const;
  void validate() const;
};

/// scale * k^{-exponent}
struct SmoothingSchedule
{
  double scale = 1.0;
  double exponent = 0.2;

  double at(std::int64_t k) const;
  void validate() const;
};

struct ScheduleSet
{
  StepSchedule primal;
  StepSchedule dual;
  SmoothingSchedule smoothing;

  void validate() const;
};

struct ScheduleValues
{
  double primal_step;
  double dual_step;
  double smoothing;
};

/// Values at iteration k >= 1.
ScheduleValues evaluate_schedules(const ScheduleSet& schedules, std::int64_t k);

} // namespace ccsa
