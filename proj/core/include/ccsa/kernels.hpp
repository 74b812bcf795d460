#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ccsa {

enum class KernelShape
{
  uniform,
  triangular,
  cosine,
  parabolic,
  quartic,
  sextic
};

//! Even, nonnegative, unit-mass bump supported on [-1, 1].
//!
//! The moments are stored in closed form; `sigma2` is the second moment
//! int z^2 h(z) dz and `l2norm2` is int h(z)^2 dz. Together they drive the
//! variance/bias trade-off of the mollified gradient estimate: the variance
//! constant scales with l2norm2 and the bias constant with sigma2.
class MollifierKernel
{
public:
  explicit MollifierKernel(KernelShape shape = KernelShape::parabolic);

  KernelShape shape() const { return shape_; }
  const std::string& name() const { return name_; }

  /// h(x)
  double evaluate(double x) const;
  /// H(x) = int_{-inf}^x h
  double cumulative(double x) const;

  double sigma2() const { return sigma2_; }
  double l2norm2() const { return l2norm2_; }
  double peak() const { return evaluate(0.0); }

  friend bool operator==(const MollifierKernel& a, const MollifierKernel& b)
  {
    return a.shape_ == b.shape_;
  }

private:
  KernelShape shape_;
  std::string name_;
  double sigma2_;
  double l2norm2_;
};

/// The six reference kernels, in catalog order.
std::vector<MollifierKernel> builtin_kernels();

/// Throws ValidationError for unknown names.
MollifierKernel kernel_by_name(std::string_view name);

/// sigma_h^{4/5} * ||h||_{L2}^{8/5}; smaller is better.
double kernel_score(const MollifierKernel& kernel);

/// Minimizer of kernel_score over builtin_kernels(); ties within 1e-6 go to
/// the earlier catalog entry.
MollifierKernel best_kernel();

} // namespace ccsa
