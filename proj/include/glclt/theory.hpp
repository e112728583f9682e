#pragma once

#include "glclt/graph.hpp"
#include "glclt/manifolds.hpp"
#include "glclt/quadrature.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace glclt {

using PointFunction = std::function<double(std::span<const double>)>;

/// lambda u^2 + lambda - 2 s |grad u|^2 rho, with s the pair's gradient scale.
double variance_integrand(const DensityModel& model, const AnalyticEigenpair& pair,
                          std::span<const double> x);

/// int (lambda u^2 + lambda - 2 s |grad u|^2 rho)^2 rho.
double sigma_sq_quadrature(const DensityModel& model, const AnalyticEigenpair& pair,
                           const QuadratureGrid& grid);

/// int t_j t_k rho with t the integrand above.
double covariance_quadrature(const DensityModel& model, const AnalyticEigenpair& pj,
                             const AnalyticEigenpair& pk, const QuadratureGrid& grid);

/// Covariance matrix over the given 1-based indices (evaluates each integrand once per node).
Eigen::MatrixXd covariance_matrix(const AnalyticSpectrum& spectrum, const std::vector<int>& indices,
                                  const QuadratureGrid& grid);

/// -lambda u^2 - lambda + 2 s |grad u|^2 rho.
double fisher_rao_gradient(const DensityModel& model, const AnalyticEigenpair& pair,
                           std::span<const double> x);

/// -lambda int xi u^2 rho + 2 s int xi |grad u|^2 rho^2. Throws NonTangentDirection
/// when |int xi rho| > tangent_tol.
double perturbation_derivative(const DensityModel& model, const AnalyticEigenpair& pair,
                               const PointFunction& xi, const QuadratureGrid& grid,
                               double tangent_tol = 1e-8);

double cramer_rao_bound(double sigma_sq, std::size_t n);

/// max_i |Delta_n u(x_i) - lambda u(x_i)| over the cloud. The spectrum's
/// scaling must describe the same limit operator as the Laplacian.
double pointwise_consistency_residual(const LaplacianOperator& op, const PointCloud& cloud,
                                      const AnalyticSpectrum& spectrum, int l);

/// sqrt(n) |mc_mean - lambda|; mc_mean must come from at least 30 repetitions.
double bias_magnitude(double mc_mean, double lambda, std::size_t n, std::size_t repetitions);

/// Eigenpairs u'_a = sum_b Q_ab u_b for an orthogonal Q over a basis of one eigenspace.
std::vector<AnalyticEigenpair> rotate_eigenspace(const std::vector<AnalyticEigenpair>& basis,
                                                 const Eigen::MatrixXd& Q);

/// Throws GridMismatch unless the grid was built for the model's manifold.
void check_grid(const DensityModel& model, const QuadratureGrid& grid);

struct TheoryReport {
  std::string manifold;
  std::string scaling;
  std::vector<int> indices;
  std::vector<std::string> labels;
  std::vector<double> lambdas;
  std::vector<double> sigma_sq;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd correlation;
  std::size_t n_for_bound = 0;
  std::vector<double> cramer_rao;
  /// Fisher-Rao gradient of each index at a few fixed grid nodes.
  std::vector<std::vector<double>> fisher_rao_samples;
  std::vector<int> grid_resolution;
};

TheoryReport compute_theory_report(const AnalyticSpectrum& spectrum, const std::vector<int>& indices,
                                   const QuadratureGrid& grid, std::size_t n_for_bound);

void write_theory_json(const TheoryReport& report, std::ostream& out);
/// Square matrix with a header row of labels.
void write_matrix_csv(const Eigen::MatrixXd& matrix, const std::vector<std::string>& labels,
                      std::ostream& out);

}  // namespace glclt
