#pragma once

#include <string>
#include <vector>

namespace glclt {

enum class KernelScaling { Normalized, Raw };

const char* to_string(KernelScaling s);
KernelScaling parse_kernel_scaling(const std::string& text);

/// Radial profile eta on [0, 1] (zero beyond 1) with the normalization
/// constant sigma_eta = int_{R^m} eta(|v|) v_1^2 dv for intrinsic dimension m.
class Kernel {
 public:
  /// eta = 1 on [0, 1].
  static Kernel indicator(int intrinsic_dim, KernelScaling scaling = KernelScaling::Raw);
  /// Piecewise-linear profile through `values` at equally spaced nodes on
  /// [0, 1]. Must be non-increasing and non-negative with values[0] > 0.
  static Kernel tabulated(std::vector<double> values, int intrinsic_dim,
                          KernelScaling scaling = KernelScaling::Raw);

  bool is_indicator() const { return table_.empty(); }
  KernelScaling scaling() const { return scaling_; }
  int intrinsic_dim() const { return dim_; }
  double sigma_eta() const { return sigma_eta_; }
  const std::vector<double>& table() const { return table_; }

  /// Unscaled profile eta(r).
  double profile(double r) const;
  /// Edge weight for normalized distance r = |x - y| / eps, including the
  /// 2 / sigma_eta factor under Normalized scaling.
  double weight(double r) const { return factor_ * profile(r); }
  /// 1 for Normalized, sigma_eta / 2 for Raw: the factor multiplying
  /// Delta_rho in the continuum limit.
  double limit_factor() const;

  Kernel with_scaling(KernelScaling s) const;
  std::string describe() const;

 private:
  Kernel(std::vector<double> table, int dim, KernelScaling scaling);
  std::vector<double> table_;
  int dim_;
  KernelScaling scaling_;
  double sigma_eta_;
  double factor_;
};

/// sigma_eta of the indicator profile: vol(B_1^m) / (m + 2).
double indicator_sigma_eta(int m);

}  // namespace glclt
