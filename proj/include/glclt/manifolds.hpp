#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace glclt {

using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A sampled data set: n points in R^d with intrinsic-dimension metadata.
struct PointCloud {
  Points points;
  int intrinsic_dim = 1;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  int ambient_dim() const { return static_cast<int>(points.cols()); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
  }
};

/// CSV with header `x0,...,x{d-1}`, one point per row, full double precision.
void write_point_cloud_csv(const PointCloud& cloud, std::ostream& out);
PointCloud read_point_cloud_csv(std::istream& in, int intrinsic_dim);

struct Circle {
  double radius = 1.0;
};
struct Ellipse {
  double semi_axis_a = 1.0;
  double semi_axis_b = 1.0;
};
/// The m-sphere of the given radius in R^{m+1}.
struct Sphere {
  int dim = 2;
  double radius = 1.0;
};
/// Torus of revolution in R^3 (tube angle measured from the outer equator).
struct EmbeddedTorus {
  double major_radius = 1.0;
  double minor_radius = 1.0;
};
/// Product of circles with the given circumferences, embedded in R^{2m}
/// as a Clifford torus with per-circle radius L_i / (2 pi).
struct FlatTorus {
  std::vector<double> side_lengths;
};

class ManifoldSpec {
 public:
  using Kind = std::variant<Circle, Ellipse, Sphere, EmbeddedTorus, FlatTorus>;

  ManifoldSpec(Kind kind);  // NOLINT: implicit by design of the variant wrapper
  template <class T, class = std::enable_if_t<std::is_constructible_v<Kind, T> &&
                                              !std::is_same_v<std::decay_t<T>, Kind>>>
  ManifoldSpec(T kind) : ManifoldSpec(Kind(std::move(kind))) {}  // NOLINT

  const Kind& kind() const { return kind_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&kind_);
  }

  /// "circle", "ellipse", "sphere", "torus", "flat-torus".
  std::string kind_name() const;
  /// Round-trippable text form, e.g. "sphere:dim=2,radius=1".
  std::string describe() const;

  int intrinsic_dim() const;
  int ambient_dim() const;
  double volume() const;

  /// Deviation from the defining equation (0 on the manifold).
  double surface_residual(std::span<const double> x) const;

  bool operator==(const ManifoldSpec& other) const { return describe() == other.describe(); }

 private:
  Kind kind_;
};

/// Parses the text form produced by ManifoldSpec::describe(). Keys that are
/// omitted take the defaults of the corresponding struct.
ManifoldSpec parse_manifold(std::string_view text);

/// n i.i.d. uniform points on the manifold. Each point draws from its own
/// counter-based stream keyed by (seed, index).
PointCloud sample(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed);

struct DensityModel {
  ManifoldSpec spec;
  double volume;

  static DensityModel uniform(const ManifoldSpec& spec);
  double rho() const { return 1.0 / volume; }
  double rho_min() const { return rho(); }
  double rho_max() const { return rho(); }
};

double density_at(const DensityModel& model, std::span<const double> x);

/// Which limit operator the analytic eigenpairs describe. The graph Laplacian
/// with a normalized kernel converges to Delta_rho; with the raw profile it
/// converges to (sigma_eta / 2) Delta_rho. LaplaceBeltrami rescales a uniform
/// model by 1/rho so eigenvalues are those of the unweighted operator.
enum class LimitConvention { Normalized, Raw, LaplaceBeltrami };

struct LimitScaling {
  LimitConvention convention = LimitConvention::Normalized;
  double factor = 1.0;

  static LimitScaling normalized() { return {LimitConvention::Normalized, 1.0}; }
  static LimitScaling raw(double sigma_eta) { return {LimitConvention::Raw, 0.5 * sigma_eta}; }
  static LimitScaling laplace_beltrami(const DensityModel& model) {
    return {LimitConvention::LaplaceBeltrami, model.volume};
  }
};

const char* to_string(LimitConvention c);

struct AnalyticEigenpair {
  int index = 1;  // 1-based position in the ascending list
  double eigenvalue = 0.0;
  /// Factor multiplying |grad u|^2 rho wherever it appears, equal to the
  /// scaling factor of the operator (so that int |grad u|^2 rho^2 * scale = lambda).
  double gradient_scale = 1.0;
  std::function<double(std::span<const double>)> value;
  /// Writes the ambient tangent gradient (length d) into `out`.
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::string label;
  int cluster = 0;       // eigenspace id, 0 for the constants
  int multiplicity = 1;  // dimension of the eigenspace

  double gradient_norm_sq(std::span<const double> x) const;
};

struct AnalyticSpectrum {
  DensityModel model;
  LimitScaling scaling;
  std::vector<AnalyticEigenpair> entries;

  const AnalyticEigenpair& at(int l) const;  // 1-based
  std::vector<int> cluster_indices(int cluster) const;
};

/// First l_max eigenpairs (ascending, canonical basis inside degenerate
/// eigenspaces). Circle/ellipse: sin before cos for each frequency. Sphere
/// (dim 2): real spherical harmonics of order -k..k (negative orders are the
/// sine family). Sphere (dim >= 3): degrees 0..2 via harmonic polynomials.
/// Flat torus: products of one-dimensional Fourier modes.
AnalyticSpectrum analytic_spectrum(const DensityModel& model, LimitScaling scaling, int l_max);

/// Arc length of the ellipse (a cos t, b sin t) measured from t = 0.
class EllipseArcLength {
 public:
  EllipseArcLength(double a, double b, int intervals = 1024);

  double perimeter() const { return perimeter_; }
  double speed(double t) const;
  double s_of_t(double t) const;  // t in [0, 2 pi)
  double t_of_s(double s) const;  // s in [0, L)
  /// Parameter of an (on-ellipse) point.
  double t_of_point(std::span<const double> x) const;

 private:
  double a_, b_;
  int intervals_;
  double h_;
  std::vector<double> cumulative_;
  double perimeter_;
  double integrate(double t0, double t1) const;
};

}  // namespace glclt
