#include "glclt/manifolds.hpp"

#include "glclt/error.hpp"
#include "glclt/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace glclt {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void validate(const ManifoldSpec::Kind& kind) {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Circle>) {
          require(k.radius > 0, ErrorCode::InvalidArgument, "circle radius must be positive");
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          require(k.semi_axis_a > 0 && k.semi_axis_b > 0, ErrorCode::InvalidArgument,
                  "ellipse semi-axes must be positive");
        } else if constexpr (std::is_same_v<T, Sphere>) {
          require(k.dim >= 1, ErrorCode::InvalidArgument, "sphere dimension must be >= 1");
          require(k.radius > 0, ErrorCode::InvalidArgument, "sphere radius must be positive");
        } else if constexpr (std::is_same_v<T, EmbeddedTorus>) {
          require(k.major_radius > 0 && k.minor_radius > 0, ErrorCode::InvalidArgument,
                  "torus radii must be positive");
        } else {
          require(!k.side_lengths.empty(), ErrorCode::InvalidArgument,
                  "flat torus needs at least one side length");
          for (double L : k.side_lengths)
            require(L > 0, ErrorCode::InvalidArgument, "flat torus side lengths must be positive");
        }
      },
      kind);
}

// Surface area of the unit m-sphere S^m in R^{m+1}.
double unit_sphere_area(int m) {
  const double d = m + 1;
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace

// ---------------------------------------------------------------------------
// ManifoldSpec

ManifoldSpec::ManifoldSpec(Kind kind) : kind_(std::move(kind)) { validate(kind_); }

std::string ManifoldSpec::kind_name() const {
  static constexpr std::array<const char*, 5> names = {"circle", "ellipse", "sphere", "torus",
                                                       "flat-torus"};
  return names[kind_.index()];
}

std::string ManifoldSpec::describe() const {
  std::string out = kind_name() + ":";
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Circle>) {
          out += "radius=" + fmt_double(k.radius);
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          out += "a=" + fmt_double(k.semi_axis_a) + ",b=" + fmt_double(k.semi_axis_b);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          out += "dim=" + std::to_string(k.dim) + ",radius=" + fmt_double(k.radius);
        } else if constexpr (std::is_same_v<T, EmbeddedTorus>) {
          out += "R=" + fmt_double(k.major_radius) + ",r=" + fmt_double(k.minor_radius);
        } else {
          out += "sides=";
          for (std::size_t i = 0; i < k.side_lengths.size(); ++i) {
            if (i) out += "/";
            out += fmt_double(k.side_lengths[i]);
          }
        }
      },
      kind_);
  return out;
}

int ManifoldSpec::intrinsic_dim() const {
  return std::visit(
      [](const auto& k) -> int {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Circle> || std::is_same_v<T, Ellipse>) return 1;
        else if constexpr (std::is_same_v<T, Sphere>) return k.dim;
        else if constexpr (std::is_same_v<T, EmbeddedTorus>) return 2;
        else return static_cast<int>(k.side_lengths.size());
      },
      kind_);
}

int ManifoldSpec::ambient_dim() const {
  return std::visit(
      [](const auto& k) -> int {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Circle> || std::is_same_v<T, Ellipse>) return 2;
        else if constexpr (std::is_same_v<T, Sphere>) return k.dim + 1;
        else if constexpr (std::is_same_v<T, EmbeddedTorus>) return 3;
        else return 2 * static_cast<int>(k.side_lengths.size());
      },
      kind_);
}

double ManifoldSpec::volume() const {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return 2.0 * kPi * k.radius;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return EllipseArcLength(k.semi_axis_a, k.semi_axis_b).perimeter();
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return unit_sphere_area(k.dim) * std::pow(k.radius, k.dim);
        } else if constexpr (std::is_same_v<T, EmbeddedTorus>) {
          return 4.0 * kPi * kPi * k.major_radius * k.minor_radius;
        } else {
          double v = 1.0;
          for (double L : k.side_lengths) v *= L;
          return v;
        }
      },
      kind_);
}

double ManifoldSpec::surface_residual(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == ambient_dim(), ErrorCode::InvalidArgument,
          "point dimension does not match manifold");
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return std::hypot(x[0], x[1]) - k.radius;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const double u = x[0] / k.semi_axis_a, v = x[1] / k.semi_axis_b;
          return u * u + v * v - 1.0;
        } else if constexpr (std::is_same_v<T, Sphere>) {
          double s = 0;
          for (double c : x) s += c * c;
          return std::sqrt(s) - k.radius;
        } else if constexpr (std::is_same_v<T, EmbeddedTorus>) {
          const double q = std::hypot(x[0], x[1]) - k.major_radius;
          return q * q + x[2] * x[2] - k.minor_radius * k.minor_radius;
        } else {
          double worst = 0;
          for (std::size_t i = 0; i < k.side_lengths.size(); ++i) {
            const double r = k.side_lengths[i] / (2.0 * kPi);
            const double dev = std::hypot(x[2 * i], x[2 * i + 1]) - r;
            if (std::abs(dev) > std::abs(worst)) worst = dev;
          }
          return worst;
        }
      },
      kind_);
}

ManifoldSpec parse_manifold(std::string_view text) {
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string_view::npos) {
    std::string rest(text.substr(colon + 1));
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      require(eq != std::string::npos, ErrorCode::InvalidArgument,
              "expected key=value in manifold spec: " + item);
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  auto num = [&](const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad number for " + key + ": " + it->second);
    }
  };
  if (kind == "circle") return Circle{num("radius", 1.0)};
  if (kind == "ellipse") return Ellipse{num("a", 1.0), num("b", 1.0)};
  if (kind == "sphere")
    return Sphere{static_cast<int>(num("dim", 2)), num("radius", 1.0)};
  if (kind == "torus") return EmbeddedTorus{num("R", 1.0), num("r", 1.0)};
  if (kind == "flat-torus") {
    FlatTorus t;
    auto it = kv.find("sides");
    if (it == kv.end()) {
      const int m = static_cast<int>(num("dim", 2));
      t.side_lengths.assign(static_cast<std::size_t>(std::max(m, 0)), 2.0 * kPi);
    } else {
      std::stringstream ss(it->second);
      std::string item;
      while (std::getline(ss, item, '/')) t.side_lengths.push_back(std::stod(item));
    }
    return t;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown manifold kind: " + kind);
}

// ---------------------------------------------------------------------------
// Point clouds

void write_point_cloud_csv(const PointCloud& cloud, std::ostream& out) {
  const int d = cloud.ambient_dim();
  for (int j = 0; j < d; ++j) out << (j ? "," : "") << "x" << j;
  out << "\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < cloud.points.rows(); ++i) {
    for (int j = 0; j < d; ++j) out << (j ? "," : "") << cloud.points(i, j);
    out << "\n";
  }
}

PointCloud read_point_cloud_csv(std::istream& in, int intrinsic_dim) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Io, "empty point cloud file");
  const auto d = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index cols = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++cols;
    }
    require(cols == d, ErrorCode::Io, "ragged row in point cloud CSV");
    ++rows;
  }
  PointCloud cloud;
  cloud.intrinsic_dim = intrinsic_dim;
  cloud.points = Eigen::Map<Points>(values.data(), rows, d);
  return cloud;
}

// ---------------------------------------------------------------------------
// Ellipse arc length

namespace {
// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlX = {-0.9602898564975363, -0.7966664774136267,
                                        -0.5255324099163290, -0.1834346424956498,
                                        0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlW = {0.1012285362903763, 0.2223810344533745,
                                        0.3137066458778873, 0.3626837833783620,
                                        0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};
}  // namespace

EllipseArcLength::EllipseArcLength(double a, double b, int intervals)
    : a_(a), b_(b), intervals_(intervals), h_(2.0 * kPi / intervals) {
  require(a > 0 && b > 0 && intervals > 0, ErrorCode::InvalidArgument, "invalid ellipse");
  cumulative_.resize(static_cast<std::size_t>(intervals_) + 1);
  cumulative_[0] = 0.0;
  for (int i = 0; i < intervals_; ++i)
    cumulative_[i + 1] = cumulative_[i] + integrate(i * h_, (i + 1) * h_);
  perimeter_ = cumulative_.back();
}

double EllipseArcLength::speed(double t) const {
  return std::hypot(a_ * std::sin(t), b_ * std::cos(t));
}

double EllipseArcLength::integrate(double t0, double t1) const {
  const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
  double s = 0;
  for (std::size_t k = 0; k < kGlX.size(); ++k) s += kGlW[k] * speed(mid + half * kGlX[k]);
  return s * half;
}

double EllipseArcLength::s_of_t(double t) const {
  t = std::fmod(t, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  int i = std::min(static_cast<int>(t / h_), intervals_ - 1);
  return cumulative_[i] + integrate(i * h_, t);
}

double EllipseArcLength::t_of_s(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0) s += perimeter_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  int i = std::clamp(static_cast<int>(it - cumulative_.begin()) - 1, 0, intervals_ - 1);
  const double frac = (s - cumulative_[i]) / (cumulative_[i + 1] - cumulative_[i]);
  double t = (i + frac) * h_;
  for (int iter = 0; iter < 6; ++iter) {
    const double step = (cumulative_[i] + integrate(i * h_, t) - s) / speed(t);
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return t;
}

double EllipseArcLength::t_of_point(std::span<const double> x) const {
  double t = std::atan2(x[1] / b_, x[0] / a_);
  if (t < 0) t += 2.0 * kPi;
  return t;
}

// ---------------------------------------------------------------------------
// Sampling

PointCloud sample(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorCode::InvalidArgument, "sample size must be >= 1");
  const int d = spec.ambient_dim();
  PointCloud cloud;
  cloud.intrinsic_dim = spec.intrinsic_dim();
  cloud.points.resize(static_cast<Eigen::Index>(n), d);

  std::shared_ptr<EllipseArcLength> arc;
  if (const auto* e = spec.get_if<Ellipse>())
    arc = std::make_shared<EllipseArcLength>(e->semi_axis_a, e->semi_axis_b);

  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i);
    double* x = cloud.points.data() + i * static_cast<std::size_t>(d);
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Circle>) {
            const double th = 2.0 * kPi * rng.uniform();
            x[0] = k.radius * std::cos(th);
            x[1] = k.radius * std::sin(th);
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            const double t = arc->t_of_s(arc->perimeter() * rng.uniform());
            x[0] = k.semi_axis_a * std::cos(t);
            x[1] = k.semi_axis_b * std::sin(t);
          } else if constexpr (std::is_same_v<T, Sphere>) {
            double norm = 0;
            do {
              norm = 0;
              for (int j = 0; j < d; ++j) {
                x[j] = rng.normal();
                norm += x[j] * x[j];
              }
            } while (norm < 1e-300);
            const double s = k.radius / std::sqrt(norm);
            for (int j = 0; j < d; ++j) x[j] *= s;
          } else if constexpr (std::is_same_v<T, EmbeddedTorus>) {
            const double R = k.major_radius, r = k.minor_radius;
            double phi = 0;
            do {
              phi = 2.0 * kPi * rng.uniform();
            } while (rng.uniform() * (R + r) > R + r * std::cos(phi));
            const double th = 2.0 * kPi * rng.uniform();
            const double rho = R + r * std::cos(phi);
            x[0] = rho * std::cos(th);
            x[1] = rho * std::sin(th);
            x[2] = r * std::sin(phi);
          } else {
            for (std::size_t j = 0; j < k.side_lengths.size(); ++j) {
              const double r = k.side_lengths[j] / (2.0 * kPi);
              const double th = 2.0 * kPi * rng.uniform();
              x[2 * j] = r * std::cos(th);
              x[2 * j + 1] = r * std::sin(th);
            }
          }
        },
        spec.kind());
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// Density

DensityModel DensityModel::uniform(const ManifoldSpec& spec) { return {spec, spec.volume()}; }

double density_at(const DensityModel& model, std::span<const double>) { return model.rho(); }

const char* to_string(LimitConvention c) {
  switch (c) {
    case LimitConvention::Normalized: return "normalized";
    case LimitConvention::Raw: return "raw";
    case LimitConvention::LaplaceBeltrami: return "laplace-beltrami";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Analytic spectra

double AnalyticEigenpair::gradient_norm_sq(std::span<const double> x) const {
  std::array<double, 64> buf{};
  require(x.size() <= buf.size(), ErrorCode::InvalidArgument, "ambient dimension too large");
  gradient(x, std::span<double>(buf.data(), x.size()));
  double s = 0;
  for (std::size_t j = 0; j < x.size(); ++j) s += buf[j] * buf[j];
  return s;
}

const AnalyticEigenpair& AnalyticSpectrum::at(int l) const {
  require(l >= 1 && l <= static_cast<int>(entries.size()), ErrorCode::InvalidArgument,
          "eigen index out of range: " + std::to_string(l));
  return entries[static_cast<std::size_t>(l - 1)];
}

std::vector<int> AnalyticSpectrum::cluster_indices(int cluster) const {
  std::vector<int> out;
  for (const auto& e : entries)
    if (e.cluster == cluster) out.push_back(e.index);
  return out;
}

namespace {

// A mode before scaling: Laplace-Beltrami eigenvalue plus evaluators.
struct Mode {
  double lb_eigenvalue;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::string label;
};

Mode constant_mode(int d) {
  return {0.0, [](std::span<const double>) { return 1.0; },
          [d](std::span<const double>, std::span<double> g) {
            for (int j = 0; j < d; ++j) g[j] = 0.0;
          },
          "const"};
}

// Fourier modes sqrt(2) sin/cos(2 pi k s / L) along a closed curve; `param`
// maps a point to (s, unit tangent).
using CurveParam = std::function<double(std::span<const double>, double* tangent)>;

void fourier_modes(int k_max, double length, const CurveParam& param, std::vector<Mode>& out) {
  for (int k = 1; k <= k_max; ++k) {
    const double w = 2.0 * kPi * k / length;
    for (int is_cos = 0; is_cos < 2; ++is_cos) {
      Mode m;
      m.lb_eigenvalue = w * w;
      m.label = std::string(is_cos ? "cos" : "sin") + "(" + std::to_string(k) + ")";
      m.value = [=](std::span<const double> x) {
        const double s = param(x, nullptr);
        return std::sqrt(2.0) * (is_cos ? std::cos(w * s) : std::sin(w * s));
      };
      m.gradient = [=](std::span<const double> x, std::span<double> g) {
        double tangent[2];
        const double s = param(x, tangent);
        const double du = std::sqrt(2.0) * w * (is_cos ? -std::sin(w * s) : std::cos(w * s));
        g[0] = du * tangent[0];
        g[1] = du * tangent[1];
      };
      out.push_back(std::move(m));
    }
  }
}

// Orthonormal associated Legendre values Pbar_k^m(cos theta) for m <= k <= k_max
// (no Condon-Shortley phase), normalized so that sum_m over the real
// harmonics below has unit L2 norm on the unit sphere.
double legendre_bar(int k, int m, double c, double s) {
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int i = 1; i <= m; ++i) pmm *= std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * s;
  if (k == m) return pmm;
  double pm1 = std::sqrt(2.0 * m + 3.0) * c * pmm;
  if (k == m + 1) return pm1;
  double pkm2 = pmm, pkm1 = pm1, pk = 0;
  for (int l = m + 2; l <= k; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
    const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
    pk = a * (c * pkm1 - b * pkm2);
    pkm2 = pkm1;
    pkm1 = pk;
  }
  return pk;
}

struct SphericalFrame {
  double r, c, s, phi;
};

SphericalFrame spherical_frame(std::span<const double> x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  double c = x[2] / r;
  c = std::clamp(c, -1.0, 1.0);
  double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  // Nudge off the poles so the 1/sin(theta) factors stay finite; the limits
  // are continuous so the error is O(1e-10).
  if (s < 1e-10) {
    s = 1e-10;
    c = std::copysign(std::sqrt(1.0 - s * s), c);
  }
  return {r, c, s, std::atan2(x[1], x[0])};
}

// Real spherical harmonic scaled by sqrt(4 pi), so that it has unit norm in
// L2(rho) for the uniform density 1/(4 pi r^2).
Mode sphere2_mode(int k, int order, double radius) {
  Mode m;
  m.lb_eigenvalue = k * (k + 1.0) / (radius * radius);
  m.label = "Y(" + std::to_string(k) + "," + std::to_string(order) + ")";
  const int am = std::abs(order);
  const double norm = std::sqrt(4.0 * kPi) * (am == 0 ? 1.0 : std::sqrt(2.0));
  auto angular = [am, order](double phi) {
    return order < 0 ? std::sin(am * phi) : (am == 0 ? 1.0 : std::cos(am * phi));
  };
  auto dangular = [am, order](double phi) {
    return order < 0 ? am * std::cos(am * phi) : (am == 0 ? 0.0 : -am * std::sin(am * phi));
  };
  m.value = [=](std::span<const double> x) {
    const auto f = spherical_frame(x);
    return norm * legendre_bar(k, am, f.c, f.s) * angular(f.phi);
  };
  m.gradient = [=](std::span<const double> x, std::span<double> g) {
    const auto f = spherical_frame(x);
    const double p = legendre_bar(k, am, f.c, f.s);
    const double pk1 = k > am ? legendre_bar(k - 1, am, f.c, f.s) : 0.0;
    const double dp =
        (k * f.c * p - std::sqrt((2.0 * k + 1.0) * (k * k - am * am) / (2.0 * k - 1.0)) * pk1) /
        f.s;
    const double d_theta = norm * dp * angular(f.phi) / f.r;
    const double d_phi = norm * p * dangular(f.phi) / (f.s * f.r);
    const double cp = std::cos(f.phi), sp = std::sin(f.phi);
    g[0] = d_theta * f.c * cp - d_phi * sp;
    g[1] = d_theta * f.c * sp + d_phi * cp;
    g[2] = -d_theta * f.s;
  };
  return m;
}

// Harmonic polynomial x^T A x / r^2 + b^T x / r restricted to the sphere.
// Gradient is the tangential projection of the ambient gradient.
Mode poly_mode(Eigen::MatrixXd A, Eigen::VectorXd b, double lb, double radius, std::string label) {
  Mode m;
  m.lb_eigenvalue = lb;
  m.label = std::move(label);
  m.value = [A, b](std::span<const double> x) {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd xh = v / v.norm();
    return xh.dot(A * xh) + b.dot(xh);
  };
  m.gradient = [A, b, radius](std::span<const double> x, std::span<double> g) {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd xh = v / v.norm();
    Eigen::VectorXd amb = 2.0 * A * xh + b;
    amb -= xh.dot(amb) * xh;
    amb /= radius;
    for (Eigen::Index j = 0; j < amb.size(); ++j) g[j] = amb[j];
  };
  (void)radius;
  return m;
}

std::vector<Mode> sphere_high_dim_modes(int dim, double radius, int l_max) {
  const int D = dim + 1;
  std::vector<Mode> modes;
  modes.push_back(constant_mode(D));
  const Eigen::MatrixXd zero_a = Eigen::MatrixXd::Zero(D, D);
  for (int i = 0; i < D; ++i) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(D);
    b[i] = std::sqrt(static_cast<double>(D));
    modes.push_back(poly_mode(zero_a, b, dim / (radius * radius), radius,
                              "x" + std::to_string(i)));
  }
  const double lb2 = 2.0 * (dim + 1.0) / (radius * radius);
  const Eigen::VectorXd zero_b = Eigen::VectorXd::Zero(D);
  for (int i = 0; i < D; ++i)
    for (int j = i + 1; j < D; ++j) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D, D);
      A(i, j) = A(j, i) = 0.5 * std::sqrt(D * (D + 2.0));
      modes.push_back(poly_mode(A, zero_b, lb2, radius,
                                "x" + std::to_string(i) + "x" + std::to_string(j)));
    }
  for (int k = 1; k < D; ++k) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D, D);
    const double c = std::sqrt(D * (D + 2.0) / (2.0 * (k + static_cast<double>(k) * k)));
    for (int i = 0; i < k; ++i) A(i, i) = c;
    A(k, k) = -k * c;
    modes.push_back(poly_mode(A, zero_b, lb2, radius, "h" + std::to_string(k)));
  }
  require(static_cast<int>(modes.size()) >= l_max, ErrorCode::UnsupportedManifold,
          "spheres of dimension >= 3 support harmonic degrees 0..2 only");
  return modes;
}

std::vector<Mode> flat_torus_modes(const FlatTorus& t, int l_max) {
  const int m = static_cast<int>(t.side_lengths.size());
  double max_side = 0;
  for (double L : t.side_lengths) max_side = std::max(max_side, L);

  struct Candidate {
    double lb;
    std::vector<int> freq;
    std::vector<int> is_cos;
  };
  for (int K = 1;; ++K) {
    std::vector<Candidate> cands;
    std::vector<int> freq(m, 0);
    // enumerate frequency vectors in [0, K]^m, lexicographic in component order
    std::function<void(int)> rec = [&](int pos) {
      if (pos == m) {
        double lb = 0;
        std::vector<int> nz;
        for (int i = 0; i < m; ++i) {
          const double w = 2.0 * kPi * freq[i] / t.side_lengths[i];
          lb += w * w;
          if (freq[i]) nz.push_back(i);
        }
        const int combos = 1 << nz.size();
        for (int c = 0; c < combos; ++c) {
          std::vector<int> is_cos(m, 0);
          for (std::size_t q = 0; q < nz.size(); ++q)
            is_cos[nz[q]] = (c >> (nz.size() - 1 - q)) & 1;
          cands.push_back({lb, freq, is_cos});
        }
        return;
      }
      for (int k = 0; k <= K; ++k) {
        freq[pos] = k;
        rec(pos + 1);
      }
    };
    rec(0);
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.lb < b.lb - 1e-12 * std::max(1.0, b.lb);
    });
    // Any unseen mode has some |k_i| > K, so its eigenvalue is at least this.
    const double w_unseen = 2.0 * kPi * (K + 1) / max_side;
    const double bound = w_unseen * w_unseen;
    if (static_cast<int>(cands.size()) < l_max || cands[l_max - 1].lb >= bound * (1 - 1e-12))
      continue;
    // Include the full last cluster so multiplicities are exact.
    std::vector<Mode> modes;
    const double cutoff = cands[l_max - 1].lb;
    for (const auto& c : cands) {
      if (c.lb > cutoff * (1 + 1e-12) + 1e-14) break;
      Mode md;
      md.lb_eigenvalue = c.lb;
      std::string label;
      for (int i = 0; i < m; ++i) {
        if (i) label += "*";
        label += c.freq[i] == 0 ? std::string("1")
                                : std::string(c.is_cos[i] ? "cos" : "sin") + "(" +
                                      std::to_string(c.freq[i]) + ")";
      }
      md.label = label;
      const auto sides = t.side_lengths;
      const auto fr = c.freq;
      const auto ic = c.is_cos;
      auto factor = [sides, fr, ic](int i, std::span<const double> x, double* deriv) {
        const double r = sides[i] / (2.0 * kPi);
        const double th = std::atan2(x[2 * i + 1], x[2 * i]);
        if (fr[i] == 0) {
          if (deriv) *deriv = 0;
          return 1.0;
        }
        const double k = fr[i];
        const double v = std::sqrt(2.0) * (ic[i] ? std::cos(k * th) : std::sin(k * th));
        // derivative with respect to arc length r * th
        if (deriv)
          *deriv = std::sqrt(2.0) * k / r * (ic[i] ? -std::sin(k * th) : std::cos(k * th));
        return v;
      };
      md.value = [factor, m](std::span<const double> x) {
        double v = 1.0;
        for (int i = 0; i < m; ++i) v *= factor(i, x, nullptr);
        return v;
      };
      md.gradient = [factor, m](std::span<const double> x, std::span<double> g) {
        std::vector<double> val(m), der(m);
        for (int i = 0; i < m; ++i) val[i] = factor(i, x, &der[i]);
        for (int i = 0; i < m; ++i) {
          double coeff = der[i];
          for (int j = 0; j < m; ++j)
            if (j != i) coeff *= val[j];
          const double th = std::atan2(x[2 * i + 1], x[2 * i]);
          g[2 * i] = -coeff * std::sin(th);
          g[2 * i + 1] = coeff * std::cos(th);
        }
      };
      modes.push_back(std::move(md));
    }
    return modes;
  }
}

}  // namespace

AnalyticSpectrum analytic_spectrum(const DensityModel& model, LimitScaling scaling, int l_max) {
  require(l_max >= 1, ErrorCode::InvalidArgument, "l_max must be >= 1");
  require(scaling.factor > 0, ErrorCode::InvalidArgument, "scaling factor must be positive");
  const ManifoldSpec& spec = model.spec;
  require(!spec.get_if<EmbeddedTorus>(), ErrorCode::UnsupportedManifold,
          "the embedded torus has no closed-form spectrum");

  std::vector<Mode> modes;
  const int d = spec.ambient_dim();
  if (const auto* c = spec.get_if<Circle>()) {
    const double r = c->radius;
    modes.push_back(constant_mode(d));
    CurveParam param = [r](std::span<const double> x, double* tangent) {
      double th = std::atan2(x[1], x[0]);
      if (tangent) {
        tangent[0] = -std::sin(th);
        tangent[1] = std::cos(th);
      }
      return r * th;
    };
    fourier_modes(l_max / 2 + 1, 2.0 * kPi * r, param, modes);
  } else if (const auto* e = spec.get_if<Ellipse>()) {
    auto arc = std::make_shared<EllipseArcLength>(e->semi_axis_a, e->semi_axis_b);
    const double a = e->semi_axis_a, b = e->semi_axis_b;
    modes.push_back(constant_mode(d));
    CurveParam param = [arc, a, b](std::span<const double> x, double* tangent) {
      const double t = arc->t_of_point(x);
      if (tangent) {
        const double sp = arc->speed(t);
        tangent[0] = -a * std::sin(t) / sp;
        tangent[1] = b * std::cos(t) / sp;
      }
      return arc->s_of_t(t);
    };
    fourier_modes(l_max / 2 + 1, arc->perimeter(), param, modes);
  } else if (const auto* s = spec.get_if<Sphere>()) {
    if (s->dim == 1) {
      const double r = s->radius;
      modes.push_back(constant_mode(d));
      CurveParam param = [r](std::span<const double> x, double* tangent) {
        double th = std::atan2(x[1], x[0]);
        if (tangent) {
          tangent[0] = -std::sin(th);
          tangent[1] = std::cos(th);
        }
        return r * th;
      };
      fourier_modes(l_max / 2 + 1, 2.0 * kPi * r, param, modes);
    } else if (s->dim == 2) {
      for (int k = 0; static_cast<int>(modes.size()) < l_max; ++k)
        for (int order = -k; order <= k; ++order) modes.push_back(sphere2_mode(k, order, s->radius));
    } else {
      modes = sphere_high_dim_modes(s->dim, s->radius, l_max);
    }
  } else if (const auto* t = spec.get_if<FlatTorus>()) {
    modes = flat_torus_modes(*t, l_max);
  }

  AnalyticSpectrum out{model, scaling, {}};
  // Delta_rho = rho * LB for uniform rho; the operator is factor * Delta_rho.
  const double op_scale = scaling.factor;
  int cluster = -1;
  double prev = -1.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double lb = modes[i].lb_eigenvalue;
    if (i == 0 || std::abs(lb - prev) > 1e-10 * std::max(1.0, lb)) ++cluster;
    prev = lb;
    AnalyticEigenpair p;
    p.index = static_cast<int>(i) + 1;
    p.eigenvalue = op_scale * model.rho() * lb;
    p.gradient_scale = op_scale;
    p.value = std::move(modes[i].value);
    p.gradient = std::move(modes[i].gradient);
    p.label = std::move(modes[i].label);
    p.cluster = cluster;
    out.entries.push_back(std::move(p));
  }
  for (auto& p : out.entries) {
    int mult = 0;
    for (const auto& q : out.entries) mult += q.cluster == p.cluster;
    p.multiplicity = mult;
  }
  // Multiplicity must count the whole eigenspace, so trim only after counting.
  if (static_cast<int>(out.entries.size()) > l_max) out.entries.resize(static_cast<std::size_t>(l_max));
  return out;
}

}  // namespace glclt
