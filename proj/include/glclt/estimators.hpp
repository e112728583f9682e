#pragma once

#include "glclt/graph.hpp"
#include "glclt/spectra.hpp"

#include <Eigen/Core>

#include <vector>

namespace glclt {

/// G_i = (1 / (2 n eps^{m+2})) sum_j eta_ij (u_j - u_i)^2, the plug-in for
/// |grad u|^2 rho (times the operator's limit factor).
Eigen::VectorXd gradient_surrogate(const LaplacianOperator& op, const Eigen::VectorXd& u);

/// t_i = lambda u_i^2 + lambda - 2 G_i.
Eigen::VectorXd variance_terms(double lambda, const Eigen::VectorXd& u, const Eigen::VectorXd& G);

struct VarianceEstimate {
  double sigma_hat_sq = 0.0;
  Eigen::VectorXd terms;
  int index = 0;
  std::size_t n = 0;
  double eps = 0.0;
};

/// (1/n) sum_i t_i^2.
VarianceEstimate sigma_hat_sq(double lambda, const Eigen::VectorXd& u, const Eigen::VectorXd& G);
/// Convenience: surrogate and variance for 1-based index l of `pairs`.
VarianceEstimate sigma_hat_sq(const LaplacianOperator& op, const EigenPairs& pairs, int l);

struct CovarianceEstimate {
  std::vector<int> indices;
  Eigen::MatrixXd matrix;
  /// Eigenvalues of the matrix (ascending), reported as a conditioning diagnostic.
  Eigen::VectorXd spectrum;

  Eigen::MatrixXd correlation() const;
};

/// Sigma_jk = (1/n) sum_i t_i^(j) t_i^(k) for the given 1-based indices.
/// Non-simple indices (per `gaps`) are refused unless `force` is set.
CovarianceEstimate cov_hat(const EigenPairs& pairs, const std::vector<int>& indices,
                           const std::vector<Eigen::VectorXd>& surrogates,
                           const EigengapReport& gaps, bool force = false);

/// sqrt(n) (lambda - center) / sigma.
double studentize(double lambda_hat, double center, double sigma_hat, std::size_t n);

}  // namespace glclt
