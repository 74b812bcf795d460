#include "ccsa/schedules.hpp"

#include "ccsa/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace ccsa {

namespace {

constexpr double kSlack = 1e-12;

std::int64_t parse_int(std::string_view text)
{
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ValidationError("malformed rational '" + std::string(text) + "'");
  return value;
}

// Shared checker for the three inequality families: the third condition is
// 2 gamma - m beta > 1, where m is the variance growth exponent.
template <typename T, typename Less, typename LessEq>
ConditionReport check(T gamma, T beta, T growth, Less strictly_less, LessEq less_eq,
                      const std::string& third_label)
{
  ConditionReport report;
  const T one = T(1);
  if (!less_eq(gamma, one))
    report.violations.push_back("gamma <= 1");
  if (!strictly_less(one, beta + gamma))
    report.violations.push_back("beta + gamma > 1");
  if (!strictly_less(one, T(2) * gamma - growth * beta))
    report.violations.push_back(third_label);
  report.pass = report.violations.empty();
  return report;
}

std::string third_label(FdHypothesis hypothesis)
{
  switch (hypothesis) {
    case FdHypothesis::h3:
      return "2 gamma - beta/2 > 1";
    case FdHypothesis::h4:
      return "2 gamma - 3 beta/4 > 1";
    case FdHypothesis::none:
      return "2 gamma - beta > 1";
  }
  return "";
}

void require_positive(double gamma, double beta)
{
  if (!(gamma > 0.0) || !(beta > 0.0))
    throw ValidationError("exponents gamma and beta must be positive");
}

void require_positive(Rational gamma, Rational beta)
{
  if (gamma <= Rational(0) || beta <= Rational(0))
    throw ValidationError("exponents gamma and beta must be positive");
}

} // namespace

Rational Rational::parse(std::string_view text)
{
  const auto slash = text.find('/');
  if (slash == std::string_view::npos)
    return Rational(parse_int(text));
  const std::int64_t den = parse_int(text.substr(slash + 1));
  if (den == 0)
    throw ValidationError("rational with zero denominator");
  return Rational(parse_int(text.substr(0, slash)), den);
}

std::string Rational::str() const
{
  if (den_ == 1)
    return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

const char* to_string(FdHypothesis h) noexcept
{
  switch (h) {
    case FdHypothesis::h3:
      return "H3";
    case FdHypothesis::h4:
      return "H4";
    case FdHypothesis::none:
      return "none";
  }
  return "unknown";
}

FdHypothesis parse_hypothesis(std::string_view text)
{
  if (text == "H3" || text == "h3")
    return FdHypothesis::h3;
  if (text == "H4" || text == "h4")
    return FdHypothesis::h4;
  if (text == "none")
    return FdHypothesis::none;
  throw ValidationError("unknown hypothesis tag '" + std::string(text) + "'");
}

Rational variance_growth(EstimatorKind kind, FdHypothesis hypothesis)
{
  if (kind != EstimatorKind::fd)
    return Rational(1, 2);
  switch (hypothesis) {
    case FdHypothesis::h3:
      return Rational(1, 2);
    case FdHypothesis::h4:
      return Rational(3, 4);
    case FdHypothesis::none:
      return Rational(1);
  }
  return Rational(1);
}

ConditionReport check_conditions_ac(Rational gamma, Rational beta)
{
  return check_conditions_fd(gamma, beta, FdHypothesis::h3);
}

ConditionReport check_conditions_fd(Rational gamma, Rational beta, FdHypothesis hypothesis)
{
  require_positive(gamma, beta);
  return check(
    gamma, beta, variance_growth(EstimatorKind::fd, hypothesis),
    [](Rational a, Rational b) { return a < b; },
    [](Rational a, Rational b) { return a <= b; }, third_label(hypothesis));
}

ConditionReport check_conditions_ac(double gamma, double beta)
{
  return check_conditions_fd(gamma, beta, FdHypothesis::h3);
}

ConditionReport check_conditions_fd(double gamma, double beta, FdHypothesis hypothesis)
{
  require_positive(gamma, beta);
  return check(
    gamma, beta, variance_growth(EstimatorKind::fd, hypothesis).to_double(),
    [](double a, double b) { return b - a > kSlack; },
    [](double a, double b) { return a <= b + kSlack; }, third_label(hypothesis));
}

RateTuning predict_rate(Rational gamma, Rational beta, EstimatorKind kind,
                        FdHypothesis hypothesis)
{
  const FdHypothesis h = kind == EstimatorKind::fd ? hypothesis : FdHypothesis::h3;
  const ConditionReport report = check_conditions_fd(gamma, beta, h);
  if (!report) {
    std::string msg = "convergence conditions violated:";
    for (const auto& v : report.violations)
      msg += " [" + v + "]";
    throw ValidationError(msg);
  }
  const Rational delta = -(variance_growth(kind, h) * beta);
  const Rational kappa = std::min(Rational(2) * beta, gamma + delta);
  return {gamma, beta, delta, kappa};
}

RateTuning optimal_tuning(EstimatorKind kind, FdHypothesis hypothesis)
{
  // 2 beta = 1 - m beta  =>  beta = 1 / (2 + m)
  const Rational m = variance_growth(kind, hypothesis);
  const Rational beta = Rational(1) / (Rational(2) + m);
  return predict_rate(Rational(1), beta, kind, hypothesis);
}

double StepSchedule::at(std::int64_t k) const
{
  if (k < 1)
    throw ValidationError("schedules are indexed from k = 1");
  return numerator / std::pow(offset + static_cast<double>(k), exponent);
}

void StepSchedule::validate() const
{
  if (!(numerator > 0.0) || !(offset >= 0.0) || !(exponent > 0.0))
    throw ValidationError("step schedule requires numerator > 0, offset >= 0, exponent > 0");
}

double SmoothingSchedule::at(std::int64_t k) const
{
  if (k < 1)
    throw ValidationError("schedules are indexed from k = 1");
  return scale * std::pow(static_cast<double>(k), -exponent);
}

void SmoothingSchedule::validate() const
{
  if (!(scale > 0.0) || !(exponent >= 0.0))
    throw ValidationError("smoothing schedule requires scale > 0 and exponent >= 0");
}

void ScheduleSet::validate() const
{
  primal.validate();
  dual.validate();
  smoothing.validate();
}

ScheduleValues evaluate_schedules(const ScheduleSet& schedules, std::int64_t k)
{
  return {schedules.primal.at(k), schedules.dual.at(k), schedules.smoothing.at(k)};
}

} // namespace ccsa
