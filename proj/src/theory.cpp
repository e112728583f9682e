#include "glclt/theory.hpp"

#include "glclt/error.hpp"

#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>

namespace glclt {

void check_grid(const DensityModel& model, const QuadratureGrid& grid) {
  require(model.spec.describe() == grid.manifold, ErrorCode::GridMismatch,
          "grid built for " + grid.manifold + ", model is " + model.spec.describe());
}

double variance_integrand(const DensityModel& model, const AnalyticEigenpair& pair,
                          std::span<const double> x) {
  const double u = pair.value(x);
  const double rho = density_at(model, x);
  return pair.eigenvalue * u * u + pair.eigenvalue -
         2.0 * pair.gradient_scale * pair.gradient_norm_sq(x) * rho;
}

double sigma_sq_quadrature(const DensityModel& model, const AnalyticEigenpair& pair,
                           const QuadratureGrid& grid) {
  check_grid(model, grid);
  return integrate(grid, [&](std::span<const double> x) {
    const double t = variance_integrand(model, pair, x);
    return t * t * density_at(model, x);
  });
}

double covariance_quadrature(const DensityModel& model, const AnalyticEigenpair& pj,
                             const AnalyticEigenpair& pk, const QuadratureGrid& grid) {
  check_grid(model, grid);
  return integrate(grid, [&](std::span<const double> x) {
    return variance_integrand(model, pj, x) * variance_integrand(model, pk, x) *
           density_at(model, x);
  });
}

Eigen::MatrixXd covariance_matrix(const AnalyticSpectrum& spectrum, const std::vector<int>& indices,
                                  const QuadratureGrid& grid) {
  check_grid(spectrum.model, grid);
  const auto L = static_cast<Eigen::Index>(indices.size());
  const auto N = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd terms(N, L);
  for (Eigen::Index k = 0; k < L; ++k) {
    const auto& p = spectrum.at(indices[static_cast<std::size_t>(k)]);
    for (Eigen::Index i = 0; i < N; ++i) {
      const auto x = grid.node(static_cast<std::size_t>(i));
      terms(i, k) = variance_integrand(spectrum.model, p, x);
    }
  }
  Eigen::MatrixXd C(L, L);
  std::vector<double> buf(static_cast<std::size_t>(N));
  for (Eigen::Index a = 0; a < L; ++a)
    for (Eigen::Index b = a; b < L; ++b) {
      for (Eigen::Index i = 0; i < N; ++i) {
        const auto x = grid.node(static_cast<std::size_t>(i));
        buf[static_cast<std::size_t>(i)] =
            grid.weights[i] * terms(i, a) * terms(i, b) * density_at(spectrum.model, x);
      }
      C(a, b) = C(b, a) = pairwise_sum(buf.data(), buf.size());
    }
  return C;
}

double fisher_rao_gradient(const DensityModel& model, const AnalyticEigenpair& pair,
                           std::span<const double> x) {
  return -variance_integrand(model, pair, x);
}

double perturbation_derivative(const DensityModel& model, const AnalyticEigenpair& pair,
                               const PointFunction& xi, const QuadratureGrid& grid,
                               double tangent_tol) {
  check_grid(model, grid);
  const double mass = integrate(grid, [&](std::span<const double> x) {
    return xi(x) * density_at(model, x);
  });
  if (std::abs(mass) > tangent_tol)
    throw Error(ErrorCode::NonTangentDirection,
                "direction has nonzero mass " + std::to_string(mass));
  return integrate(grid, [&](std::span<const double> x) {
    const double u = pair.value(x);
    const double rho = density_at(model, x);
    const double v = xi(x);
    return -pair.eigenvalue * v * u * u * rho +
           2.0 * pair.gradient_scale * v * pair.gradient_norm_sq(x) * rho * rho;
  });
}

double cramer_rao_bound(double sigma_sq, std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  return sigma_sq / static_cast<double>(n);
}

double pointwise_consistency_residual(const LaplacianOperator& op, const PointCloud& cloud,
                                      const AnalyticSpectrum& spectrum, int l) {
  require(cloud.size() == op.size(), ErrorCode::InvalidArgument, "cloud and operator differ in size");
  const bool same_limit = spectrum.scaling.convention != LimitConvention::LaplaceBeltrami &&
                          std::abs(spectrum.scaling.factor - op.limit_factor()) <=
                              1e-12 * std::max(1.0, op.limit_factor());
  require(same_limit, ErrorCode::ScalingMismatch,
          "analytic spectrum does not describe the operator's continuum limit");
  const auto& p = spectrum.at(l);
  Eigen::VectorXd u(static_cast<Eigen::Index>(cloud.size()));
  for (std::size_t i = 0; i < cloud.size(); ++i) u[static_cast<Eigen::Index>(i)] = p.value(cloud.point(i));
  const Eigen::VectorXd lu = op.apply(u);
  return (lu - p.eigenvalue * u).cwiseAbs().maxCoeff();
}

double bias_magnitude(double mc_mean, double lambda, std::size_t n, std::size_t repetitions) {
  require(repetitions >= 30, ErrorCode::InvalidArgument,
          "bias statistic needs at least 30 repetitions");
  return std::sqrt(static_cast<double>(n)) * std::abs(mc_mean - lambda);
}

std::vector<AnalyticEigenpair> rotate_eigenspace(const std::vector<AnalyticEigenpair>& basis,
                                                 const Eigen::MatrixXd& Q) {
  const auto k = static_cast<Eigen::Index>(basis.size());
  require(Q.rows() == k && Q.cols() == k, ErrorCode::InvalidArgument, "rotation size mismatch");
  require((Q.transpose() * Q - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-10,
          ErrorCode::InvalidArgument, "rotation must be orthogonal");
  for (const auto& p : basis)
    require(std::abs(p.eigenvalue - basis[0].eigenvalue) <= 1e-12 * std::max(1.0, basis[0].eigenvalue),
            ErrorCode::InvalidArgument, "rotation mixes different eigenvalues");
  auto shared = std::make_shared<std::vector<AnalyticEigenpair>>(basis);
  std::vector<AnalyticEigenpair> out;
  for (Eigen::Index a = 0; a < k; ++a) {
    AnalyticEigenpair p = basis[static_cast<std::size_t>(a)];
    const Eigen::VectorXd row = Q.row(a).transpose();
    p.label = "rot" + std::to_string(a);
    p.value = [shared, row](std::span<const double> x) {
      double s = 0;
      for (Eigen::Index b = 0; b < row.size(); ++b) s += row[b] * (*shared)[static_cast<std::size_t>(b)].value(x);
      return s;
    };
    p.gradient = [shared, row](std::span<const double> x, std::span<double> g) {
      std::vector<double> tmp(x.size());
      for (double& v : g) v = 0;
      for (Eigen::Index b = 0; b < row.size(); ++b) {
        (*shared)[static_cast<std::size_t>(b)].gradient(x, tmp);
        for (std::size_t j = 0; j < x.size(); ++j) g[j] += row[b] * tmp[j];
      }
    };
    out.push_back(std::move(p));
  }
  return out;
}

TheoryReport compute_theory_report(const AnalyticSpectrum& spectrum, const std::vector<int>& indices,
                                   const QuadratureGrid& grid, std::size_t n_for_bound) {
  TheoryReport rep;
  rep.manifold = spectrum.model.spec.describe();
  rep.scaling = to_string(spectrum.scaling.convention);
  rep.indices = indices;
  rep.grid_resolution = grid.resolution;
  rep.n_for_bound = n_for_bound;
  rep.covariance = covariance_matrix(spectrum, indices, grid);
  const auto L = rep.covariance.rows();
  rep.correlation = rep.covariance;
  for (Eigen::Index a = 0; a < L; ++a)
    for (Eigen::Index b = 0; b < L; ++b) {
      const double den = std::sqrt(rep.covariance(a, a) * rep.covariance(b, b));
      rep.correlation(a, b) = den > 0 ? rep.covariance(a, b) / den : std::nan("");
    }
  const std::size_t probes = std::min<std::size_t>(8, grid.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& p = spectrum.at(indices[k]);
    rep.labels.push_back(p.label);
    rep.lambdas.push_back(p.eigenvalue);
    const double s2 = rep.covariance(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    rep.sigma_sq.push_back(s2);
    rep.cramer_rao.push_back(n_for_bound ? cramer_rao_bound(s2, n_for_bound) : 0.0);
    std::vector<double> fr;
    for (std::size_t q = 0; q < probes; ++q)
      fr.push_back(fisher_rao_gradient(spectrum.model, p, grid.node(q * grid.size() / probes)));
    rep.fisher_rao_samples.push_back(std::move(fr));
  }
  return rep;
}

void write_theory_json(const TheoryReport& r, std::ostream& out) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["manifold"] = r.manifold;
  j["scaling"] = r.scaling;
  j["grid_resolution"] = r.grid_resolution;
  j["n_for_bound"] = r.n_for_bound;
  auto matrix = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index b = 0; b < m.cols(); ++b) row.push_back(m(a, b));
      rows.push_back(row);
    }
    return rows;
  };
  j["covariance"] = matrix(r.covariance);
  j["correlation"] = matrix(r.correlation);
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t k = 0; k < r.indices.size(); ++k) {
    entries.push_back({{"index", r.indices[k]},
                       {"label", r.labels[k]},
                       {"lambda", r.lambdas[k]},
                       {"sigma_sq", r.sigma_sq[k]},
                       {"cramer_rao_bound", r.cramer_rao[k]},
                       {"fisher_rao_samples", r.fisher_rao_samples[k]}});
  }
  j["entries"] = entries;
  out << std::setw(2) << j << "\n";
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& labels,
                      std::ostream& out) {
  out << "label";
  for (const auto& l : labels) out << "," << l;
  out << "\n" << std::setprecision(17);
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    out << labels[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < m.cols(); ++b) out << "," << m(a, b);
    out << "\n";
  }
}

}  // namespace glclt
