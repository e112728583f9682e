#include "glclt/kernel.hpp"

#include "glclt/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace glclt {

namespace {

double unit_sphere_surface(int m) {  // |S^{m-1}|
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

}  // namespace

const char* to_string(KernelScaling s) {
  return s == KernelScaling::Normalized ? "normalized" : "raw";
}

KernelScaling parse_kernel_scaling(const std::string& text) {
  if (text == "normalized") return KernelScaling::Normalized;
  if (text == "raw") return KernelScaling::Raw;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel scaling: " + text);
}

double indicator_sigma_eta(int m) {
  require(m >= 1, ErrorCode::InvalidArgument, "intrinsic dimension must be >= 1");
  return unit_sphere_surface(m) / m / (m + 2.0);
}

Kernel::Kernel(std::vector<double> table, int dim, KernelScaling scaling)
    : table_(std::move(table)), dim_(dim), scaling_(scaling) {
  require(dim >= 1, ErrorCode::InvalidArgument, "intrinsic dimension must be >= 1");
  if (table_.empty()) {
    sigma_eta_ = indicator_sigma_eta(dim);
  } else {
    // Radial moment (1/m)|S^{m-1}| int_0^1 eta(r) r^{m+1} dr; exact per
    // linear segment since the integrand is a polynomial of degree m + 2.
    const int segs = static_cast<int>(table_.size()) - 1;
    const double h = 1.0 / segs;
    double moment = 0;
    for (int i = 0; i < segs; ++i) {
      const double a = i * h;
      moment += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double r) { return profile(r) * std::pow(r, dim + 1); }, a, a + h);
    }
    sigma_eta_ = unit_sphere_surface(dim) / dim * moment;
  }
  factor_ = scaling_ == KernelScaling::Normalized ? 2.0 / sigma_eta_ : 1.0;
}

Kernel Kernel::indicator(int intrinsic_dim, KernelScaling scaling) {
  return Kernel({}, intrinsic_dim, scaling);
}

Kernel Kernel::tabulated(std::vector<double> values, int intrinsic_dim, KernelScaling scaling) {
  require(values.size() >= 2, ErrorCode::InvalidArgument, "kernel table needs >= 2 nodes");
  require(values[0] > 0, ErrorCode::InvalidArgument, "kernel profile must be positive at 0");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(values[i] >= 0, ErrorCode::InvalidArgument, "kernel profile must be non-negative");
    if (i) require(values[i] <= values[i - 1], ErrorCode::InvalidArgument,
                   "kernel profile must be non-increasing");
  }
  return Kernel(std::move(values), intrinsic_dim, scaling);
}

double Kernel::profile(double r) const {
  if (r < 0 || r > 1) return 0.0;
  if (table_.empty()) return 1.0;
  const int segs = static_cast<int>(table_.size()) - 1;
  const double pos = r * segs;
  const int i = std::min(static_cast<int>(pos), segs - 1);
  const double f = pos - i;
  return (1 - f) * table_[i] + f * table_[i + 1];
}

double Kernel::limit_factor() const {
  return scaling_ == KernelScaling::Normalized ? 1.0 : 0.5 * sigma_eta_;
}

Kernel Kernel::with_scaling(KernelScaling s) const { return Kernel(table_, dim_, s); }

std::string Kernel::describe() const {
  std::ostringstream os;
  os << (is_indicator() ? "indicator" : "tabulated") << "/" << to_string(scaling_) << "/m=" << dim_;
  return os.str();
}

}  // namespace glclt
