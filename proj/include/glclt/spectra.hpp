#pragma once

#include "glclt/graph.hpp"
#include "glclt/manifolds.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace glclt {

struct SolverOptions {
  /// Relative residual tolerance: ||L v - lambda v|| <= tol * ||L|| for unit v.
  double tol = 1e-10;
  /// Matrix-vector product budget per component; 0 selects 50 * count * ceil(log n).
  long max_matvecs = 0;
  /// Components up to this size are solved densely.
  std::size_t dense_threshold = 512;
  /// Krylov basis size; 0 selects an automatic value.
  int basis_size = 0;
  std::uint64_t seed = 0x1a2b3c4d5e6f7081ULL;
};

/// Smallest eigenpairs of a graph Laplacian. Columns of `vectors` have unit
/// norm in L2(X_n), i.e. (1/n) sum v_i^2 = 1, and their largest-magnitude
/// entry is positive.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  /// ||Delta_n v - lambda v||_{L2(X_n)} per pair.
  Eigen::VectorXd residuals;
  /// Upper estimate of ||Delta_n|| used for the relative tolerance.
  double norm_estimate = 0.0;
  long matvecs = 0;
  bool dense = false;

  int count() const { return static_cast<int>(values.size()); }
  double value(int l) const;              // 1-based
  Eigen::VectorXd vector(int l) const;    // 1-based
};

EigenPairs smallest_eigenpairs(const LaplacianOperator& op, int count,
                               const SolverOptions& options = {});
EigenPairs smallest_eigenpairs(const LaplacianOperator& op, int count, double tol);

/// v or -v, whichever has non-negative L2(X_n) inner product with `reference`.
Eigen::VectorXd align_sign(const Eigen::VectorXd& v, const Eigen::VectorXd& reference);

/// (1/(n^2 eps^{m+2})) sum_ij eta_ij (f_i - f_j)^2, computed as 2 <Delta_n f, f>.
double h1_seminorm(const Eigen::VectorXd& f, const LaplacianOperator& op);

struct EigengapReport {
  std::vector<double> gaps;   // gamma_l, index l-1
  std::vector<bool> simple;   // gamma_l > threshold
  double threshold = 1e-8;

  bool is_simple(int l) const { return simple.at(static_cast<std::size_t>(l - 1)); }
};

/// Gaps from a sorted list of values: min over k != l of |lambda_k - lambda_l|.
EigengapReport eigengap_report(const Eigen::VectorXd& values, double threshold = 1e-8);
EigengapReport eigengap_report(const AnalyticSpectrum& spectrum, double threshold = 1e-8);

/// `index,value,residual` and optionally `v0..v{n-1}` per row.
void write_eigenpairs_csv(const EigenPairs& pairs, std::ostream& out, bool dump_vectors);

}  // namespace glclt
