#pragma once

#include "glclt/kernel.hpp"
#include "glclt/manifolds.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace glclt {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Symmetric epsilon-neighbourhood graph stored as a weight matrix with both
/// (i, j) and (j, i) entries, columns sorted within each row.
struct EpsGraph {
  std::size_t n = 0;
  double eps = 0.0;
  Kernel kernel = Kernel::indicator(1);
  SparseRowMatrix weights;
  Eigen::VectorXd degree;
  std::vector<int> component;  // component id per vertex, ids in order of first vertex
  int component_count = 0;

  bool connected() const { return component_count == 1; }
  std::size_t edge_count() const { return static_cast<std::size_t>(weights.nonZeros()) / 2; }
  /// Average number of neighbours per vertex.
  double mean_neighbors() const;
};

/// Connects every pair with |x_i - x_j| <= eps (closed ball, no self-loops)
/// with weight kernel.weight(|x_i - x_j| / eps). Neighbours are found with a
/// uniform cell grid of side eps over (at most) the three coordinates of
/// largest spread.
EpsGraph build_eps_graph(const PointCloud& cloud, double eps, const Kernel& kernel);

/// Coordinate list `i,j,weight` with i < j.
void write_adjacency_csv(const EpsGraph& graph, std::ostream& out);

/// Delta_n = scale * (D - W) with scale = 1 / (n_scale * eps^{m+2}).
class LaplacianOperator {
 public:
  LaplacianOperator() = default;
  LaplacianOperator(SparseRowMatrix weights, double scale, std::size_t n_scale, double eps, int m,
                    double limit_factor);

  /// Number of points the operator acts on.
  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  /// The n in the 1/(n eps^{m+2}) prefactor (differs from size() after leave_one_out).
  std::size_t n_scale() const { return n_scale_; }
  double scale() const { return scale_; }
  double eps() const { return eps_; }
  int intrinsic_dim() const { return m_; }
  /// Factor multiplying Delta_rho in the continuum limit (1 or sigma_eta / 2).
  double limit_factor() const { return limit_factor_; }

  const SparseRowMatrix& weights() const { return weights_; }
  const Eigen::VectorXd& degree() const { return degree_; }
  /// Original point index for each row (identity unless produced by leave_one_out).
  const std::vector<int>& point_index() const { return point_index_; }

  /// y = Delta_n x, evaluated as scale * sum_j w_ij (x_i - x_j) so that
  /// constants map to exactly zero.
  void apply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// <f, Delta_n g> in L2(X_n): (1/size) f^T Delta_n g.
  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;

  SparseRowMatrix matrix() const;
  Eigen::MatrixXd dense() const;

  /// Connected components of the weight graph.
  std::vector<int> components(int* count) const;

  void set_point_index(std::vector<int> index) { point_index_ = std::move(index); }

 private:
  SparseRowMatrix weights_;
  Eigen::VectorXd degree_;
  double scale_ = 1.0;
  std::size_t n_scale_ = 0;
  double eps_ = 0.0;
  int m_ = 1;
  double limit_factor_ = 1.0;
  std::vector<int> point_index_;
};

LaplacianOperator assemble_laplacian(const EpsGraph& graph, int m);

/// Operator on X_n \ {x_i} keeping the original 1/(n eps^{m+2}) scale.
LaplacianOperator leave_one_out(const LaplacianOperator& op, std::size_t i);

/// Matrix Market coordinate format (real symmetric, lower triangle).
void write_matrix_market(const LaplacianOperator& op, std::ostream& out);

}  // namespace glclt
