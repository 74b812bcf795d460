#include "ccsa/kernels.hpp"

#include "ccsa/error.hpp"

#include <cmath>
#include <numbers>

namespace ccsa {

namespace {

constexpr double pi = std::numbers::pi;

struct KernelInfo
{
  const char* name;
  double sigma2;
  double l2norm2;
};

KernelInfo info(KernelShape shape)
{
  switch (shape) {
    case KernelShape::uniform:
      return {"uniform", 1.0 / 3.0, 0.5};
    case KernelShape::triangular:
      return {"triangular", 1.0 / 6.0, 2.0 / 3.0};
    case KernelShape::cosine:
      return {"cosine", 1.0 - 8.0 / (pi * pi), pi * pi / 16.0};
    case KernelShape::parabolic:
      return {"parabolic", 0.2, 0.6};
    case KernelShape::quartic:
      return {"quartic", 1.0 / 7.0, 5.0 / 7.0};
    case KernelShape::sextic:
      return {"sextic", 1.0 / 9.0, 350.0 / 429.0};
  }
  throw ValidationError("unknown kernel shape");
}

} // namespace

MollifierKernel::MollifierKernel(KernelShape shape)
  : shape_(shape)
{
  const KernelInfo k = info(shape);
  name_ = k.name;
  sigma2_ = k.sigma2;
  l2norm2_ = k.l2norm2;
}

double MollifierKernel::evaluate(double x) const
{
  if (x < -1.0 || x > 1.0)
    return 0.0;
  const double w = 1.0 - x * x;
  switch (shape_) {
    case KernelShape::uniform:
      return 0.5;
    case KernelShape::triangular:
      return 1.0 - std::abs(x);
    case KernelShape::cosine:
      return 0.25 * pi * std::cos(0.5 * pi * x);
    case KernelShape::parabolic:
      return 0.75 * w;
    case KernelShape::quartic:
      return 15.0 / 16.0 * w * w;
    case KernelShape::sextic:
      return 35.0 / 32.0 * w * w * w;
  }
  return 0.0;
}

double MollifierKernel::cumulative(double x) const
{
  if (x <= -1.0)
    return 0.0;
  if (x >= 1.0)
    return 1.0;
  const double x2 = x * x;
  switch (shape_) {
    case KernelShape::uniform:
      return 0.5 * (x + 1.0);
    case KernelShape::triangular:
      return x < 0.0 ? 0.5 * (1.0 + x) * (1.0 + x) : 1.0 - 0.5 * (1.0 - x) * (1.0 - x);
    case KernelShape::cosine:
      return 0.5 * (1.0 + std::sin(0.5 * pi * x));
    case KernelShape::parabolic:
      return 0.25 * (2.0 + 3.0 * x - x * x2);
    case KernelShape::quartic:
      return 0.5 + 15.0 / 16.0 * x * (1.0 - x2 * (2.0 / 3.0 - x2 / 5.0));
    case KernelShape::sextic:
      return 0.5 + 35.0 / 32.0 * x * (1.0 - x2 * (1.0 - x2 * (0.6 - x2 / 7.0)));
  }
  return 0.0;
}

std::vector<MollifierKernel> builtin_kernels()
{
  return {MollifierKernel(KernelShape::uniform),   MollifierKernel(KernelShape::triangular),
          MollifierKernel(KernelShape::cosine),    MollifierKernel(KernelShape::parabolic),
          MollifierKernel(KernelShape::quartic),   MollifierKernel(KernelShape::sextic)};
}

MollifierKernel kernel_by_name(std::string_view name)
{
  for (const auto& k : builtin_kernels()) {
    if (k.name() == name)
      return k;
  }
  throw ValidationError("unknown kernel '" + std::string(name) + "'");
}

double kernel_score(const MollifierKernel& kernel)
{
  // (sigma^2)^{2/5} (||h||^2)^{4/5}
  return std::pow(kernel.sigma2(), 0.4) * std::pow(kernel.l2norm2(), 0.8);
}

MollifierKernel best_kernel()
{
  const auto catalog = builtin_kernels();
  const MollifierKernel* best = &catalog.front();
  double best_score = kernel_score(*best);
  for (const auto& k : catalog) {
    const double s = kernel_score(k);
    if (s < best_score - 1e-6) {
      best = &k;
      best_score = s;
    }
  }
  return *best;
}

} // namespace ccsa
