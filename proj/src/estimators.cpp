#include "glclt/estimators.hpp"

#include "glclt/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace glclt {

Eigen::VectorXd gradient_surrogate(const LaplacianOperator& op, const Eigen::VectorXd& u) {
  require(static_cast<std::size_t>(u.size()) == op.size(), ErrorCode::InvalidArgument,
          "vector size does not match the operator");
  const auto& W = op.weights();
  Eigen::VectorXd G(u.size());
  for (Eigen::Index i = 0; i < W.outerSize(); ++i) {
    double s = 0;
    for (SparseRowMatrix::InnerIterator it(W, i); it; ++it) {
      const double diff = u[it.col()] - u[i];
      s += it.value() * diff * diff;
    }
    G[i] = 0.5 * op.scale() * s;
  }
  return G;
}

Eigen::VectorXd variance_terms(double lambda, const Eigen::VectorXd& u, const Eigen::VectorXd& G) {
  require(u.size() == G.size(), ErrorCode::InvalidArgument, "size mismatch");
  return (lambda * u.array().square() + lambda - 2.0 * G.array()).matrix();
}

VarianceEstimate sigma_hat_sq(double lambda, const Eigen::VectorXd& u, const Eigen::VectorXd& G) {
  VarianceEstimate est;
  est.terms = variance_terms(lambda, u, G);
  est.n = static_cast<std::size_t>(u.size());
  est.sigma_hat_sq = est.terms.squaredNorm() / static_cast<double>(u.size());
  return est;
}

VarianceEstimate sigma_hat_sq(const LaplacianOperator& op, const EigenPairs& pairs, int l) {
  const Eigen::VectorXd u = pairs.vector(l);
  VarianceEstimate est = sigma_hat_sq(pairs.value(l), u, gradient_surrogate(op, u));
  est.index = l;
  est.eps = op.eps();
  return est;
}

Eigen::MatrixXd CovarianceEstimate::correlation() const {
  const Eigen::VectorXd d = matrix.diagonal().cwiseSqrt();
  Eigen::MatrixXd c = matrix;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      c(i, j) = (d[i] > 0 && d[j] > 0) ? matrix(i, j) / (d[i] * d[j]) : std::nan("");
  return c;
}

CovarianceEstimate cov_hat(const EigenPairs& pairs, const std::vector<int>& indices,
                           const std::vector<Eigen::VectorXd>& surrogates,
                           const EigengapReport& gaps, bool force) {
  require(!indices.empty(), ErrorCode::InvalidArgument, "no indices");
  require(indices.size() == surrogates.size(), ErrorCode::InvalidArgument,
          "one surrogate per index is required");
  const auto L = static_cast<Eigen::Index>(indices.size());
  const auto n = static_cast<Eigen::Index>(pairs.vectors.rows());
  Eigen::MatrixXd terms(n, L);
  for (Eigen::Index k = 0; k < L; ++k) {
    const int l = indices[static_cast<std::size_t>(k)];
    if (!force && !gaps.is_simple(l))
      throw Error(ErrorCode::NonSimpleIndex, "eigenvalue " + std::to_string(l) + " is not simple");
    terms.col(k) = variance_terms(pairs.value(l), pairs.vector(l), surrogates[static_cast<std::size_t>(k)]);
  }
  CovarianceEstimate est;
  est.indices = indices;
  est.matrix = terms.transpose() * terms / static_cast<double>(n);
  // Diagonal exactly as sigma_hat_sq computes it.
  for (Eigen::Index k = 0; k < L; ++k) est.matrix(k, k) = terms.col(k).squaredNorm() / static_cast<double>(n);
  est.matrix = 0.5 * (est.matrix + est.matrix.transpose()).eval();
  est.spectrum = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(est.matrix, Eigen::EigenvaluesOnly).eigenvalues();
  return est;
}

double studentize(double lambda_hat, double center, double sigma_hat, std::size_t n) {
  if (!(sigma_hat > 0)) throw Error(ErrorCode::ZeroVariance, "studentization needs sigma > 0");
  return std::sqrt(static_cast<double>(n)) * (lambda_hat - center) / sigma_hat;
}

}  // namespace glclt
