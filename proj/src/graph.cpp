#include "glclt/graph.hpp"

#include "glclt/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace glclt {

namespace {

using Cell = std::array<std::int64_t, 3>;

// Labels connected components by BFS; ids assigned in order of the smallest vertex.
std::vector<int> label_components(const SparseRowMatrix& w, int* count) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> comp(n, -1);
  std::vector<int> queue;
  int c = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = c;
    queue.assign(1, s);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int v = queue[q];
      for (SparseRowMatrix::InnerIterator it(w, v); it; ++it) {
        if (comp[it.col()] < 0 && it.value() != 0.0) {
          comp[it.col()] = c;
          queue.push_back(static_cast<int>(it.col()));
        }
      }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

}  // namespace

double EpsGraph::mean_neighbors() const {
  return n ? static_cast<double>(weights.nonZeros()) / static_cast<double>(n) : 0.0;
}

EpsGraph build_eps_graph(const PointCloud& cloud, double eps, const Kernel& kernel) {
  require(eps > 0 && std::isfinite(eps), ErrorCode::InvalidArgument, "eps must be positive");
  const std::size_t n = cloud.size();
  require(n >= 2, ErrorCode::InvalidArgument, "graph needs at least two points");
  const int d = cloud.ambient_dim();
  const auto& X = cloud.points;

  // Grid over the (up to) three coordinates with the largest spread.
  std::vector<int> axes(d);
  std::iota(axes.begin(), axes.end(), 0);
  Eigen::VectorXd spread = X.colwise().maxCoeff() - X.colwise().minCoeff();
  std::stable_sort(axes.begin(), axes.end(), [&](int a, int b) { return spread[a] > spread[b]; });
  const int g = std::min(d, 3);
  axes.resize(g);

  // Slightly enlarged cells guard against rounding at exact ties.
  const double side = eps * (1.0 + 1e-9);
  std::vector<Cell> cell_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    Cell c{0, 0, 0};
    for (int a = 0; a < g; ++a)
      c[a] = static_cast<std::int64_t>(std::floor(X(static_cast<Eigen::Index>(i), axes[a]) / side));
    cell_of[i] = c;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return cell_of[a] < cell_of[b]; });

  // Unique cells with [begin, end) ranges into `order`.
  std::vector<Cell> cells;
  std::vector<std::size_t> starts;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || cell_of[order[k]] != cells.back()) {
      cells.push_back(cell_of[order[k]]);
      starts.push_back(k);
    }
  }
  starts.push_back(n);

  std::vector<Eigen::Triplet<double, int>> triplets;
  std::vector<std::pair<int, double>> row;
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  const int reach[3] = {g > 0 ? 1 : 0, g > 1 ? 1 : 0, g > 2 ? 1 : 0};
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    std::vector<std::size_t> neighbor_cells;
    for (int dx = -reach[0]; dx <= reach[0]; ++dx)
      for (int dy = -reach[1]; dy <= reach[1]; ++dy)
        for (int dz = -reach[2]; dz <= reach[2]; ++dz) {
          const Cell q{c[0] + dx, c[1] + dy, c[2] + dz};
          auto it = std::lower_bound(cells.begin(), cells.end(), q);
          if (it != cells.end() && *it == q)
            neighbor_cells.push_back(static_cast<std::size_t>(it - cells.begin()));
        }
    for (std::size_t a = starts[ci]; a < starts[ci + 1]; ++a) {
      const int i = order[a];
      row.clear();
      for (std::size_t nc : neighbor_cells)
        for (std::size_t b = starts[nc]; b < starts[nc + 1]; ++b) {
          const int j = order[b];
          if (j == i) continue;
          double d2 = 0;
          for (int k = 0; k < d; ++k) {
            const double diff = X(i, k) - X(j, k);
            d2 += diff * diff;
          }
          const double dist = std::sqrt(d2);
          if (dist <= eps) {
            const double w = kernel.weight(dist / eps);
            if (w > 0) row.emplace_back(j, w);
          }
        }
      std::sort(row.begin(), row.end());
      rows[i] = row;
    }
  }

  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.size();
  triplets.reserve(nnz);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, w] : rows[i]) triplets.emplace_back(static_cast<int>(i), j, w);

  EpsGraph graph;
  graph.n = n;
  graph.eps = eps;
  graph.kernel = kernel;
  graph.weights.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  graph.weights.setFromTriplets(triplets.begin(), triplets.end());
  graph.weights.makeCompressed();
  graph.degree = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < graph.weights.outerSize(); ++i) {
    double s = 0;
    for (SparseRowMatrix::InnerIterator it(graph.weights, i); it; ++it) s += it.value();
    graph.degree[i] = s;
  }
  graph.component = label_components(graph.weights, &graph.component_count);
  return graph;
}

void write_adjacency_csv(const EpsGraph& graph, std::ostream& out) {
  out << "i,j,weight\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < graph.weights.outerSize(); ++i)
    for (SparseRowMatrix::InnerIterator it(graph.weights, i); it; ++it)
      if (it.col() > i) out << i << "," << it.col() << "," << it.value() << "\n";
}

// ---------------------------------------------------------------------------

LaplacianOperator::LaplacianOperator(SparseRowMatrix weights, double scale, std::size_t n_scale,
                                     double eps, int m, double limit_factor)
    : weights_(std::move(weights)),
      scale_(scale),
      n_scale_(n_scale),
      eps_(eps),
      m_(m),
      limit_factor_(limit_factor) {
  weights_.makeCompressed();
  degree_ = Eigen::VectorXd::Zero(weights_.rows());
  for (Eigen::Index i = 0; i < weights_.outerSize(); ++i) {
    double s = 0;
    for (SparseRowMatrix::InnerIterator it(weights_, i); it; ++it) s += it.value();
    degree_[i] = s;
  }
  point_index_.resize(static_cast<std::size_t>(weights_.rows()));
  std::iota(point_index_.begin(), point_index_.end(), 0);
}

void LaplacianOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& x,
                              Eigen::Ref<Eigen::VectorXd> y) const {
  const int* outer = weights_.outerIndexPtr();
  const int* inner = weights_.innerIndexPtr();
  const double* val = weights_.valuePtr();
  const Eigen::Index n = weights_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[i];
    double s = 0;
    for (int p = outer[i]; p < outer[i + 1]; ++p) s += val[p] * (xi - x[inner[p]]);
    y[i] = scale_ * s;
  }
}

Eigen::VectorXd LaplacianOperator::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  apply(x, y);
  return y;
}

double LaplacianOperator::inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  return f.dot(apply(g)) / static_cast<double>(size());
}

SparseRowMatrix LaplacianOperator::matrix() const {
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(weights_.nonZeros() + weights_.rows()));
  for (Eigen::Index i = 0; i < weights_.outerSize(); ++i) {
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), scale_ * degree_[i]);
    for (SparseRowMatrix::InnerIterator it(weights_, i); it; ++it)
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), -scale_ * it.value());
  }
  SparseRowMatrix L(weights_.rows(), weights_.cols());
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

Eigen::MatrixXd LaplacianOperator::dense() const { return Eigen::MatrixXd(matrix()); }

std::vector<int> LaplacianOperator::components(int* count) const {
  return label_components(weights_, count);
}

LaplacianOperator assemble_laplacian(const EpsGraph& graph, int m) {
  require(m >= 1, ErrorCode::InvalidArgument, "intrinsic dimension must be >= 1");
  const double scale = 1.0 / (static_cast<double>(graph.n) * std::pow(graph.eps, m + 2));
  require(graph.kernel.intrinsic_dim() == m, ErrorCode::ScalingMismatch,
          "kernel normalization was computed for a different intrinsic dimension");
  return LaplacianOperator(graph.weights, scale, graph.n, graph.eps, m,
                           graph.kernel.limit_factor());
}

LaplacianOperator leave_one_out(const LaplacianOperator& op, std::size_t i) {
  const std::size_t n = op.size();
  require(n >= 3, ErrorCode::InvalidArgument, "leave-one-out needs at least three points");
  require(i < n, ErrorCode::InvalidArgument, "leave-one-out index out of range");
  const auto& W = op.weights();
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(W.nonZeros()));
  const auto shift = [i](Eigen::Index k) { return static_cast<int>(k > static_cast<Eigen::Index>(i) ? k - 1 : k); };
  for (Eigen::Index r = 0; r < W.outerSize(); ++r) {
    if (r == static_cast<Eigen::Index>(i)) continue;
    for (SparseRowMatrix::InnerIterator it(W, r); it; ++it)
      if (it.col() != static_cast<Eigen::Index>(i))
        triplets.emplace_back(shift(r), shift(it.col()), it.value());
  }
  SparseRowMatrix reduced(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
  reduced.setFromTriplets(triplets.begin(), triplets.end());
  LaplacianOperator out(std::move(reduced), op.scale(), op.n_scale(), op.eps(), op.intrinsic_dim(),
                        op.limit_factor());
  std::vector<int> index;
  index.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k)
    if (k != i) index.push_back(op.point_index()[k]);
  out.set_point_index(std::move(index));
  return out;
}

void write_matrix_market(const LaplacianOperator& op, std::ostream& out) {
  const SparseRowMatrix L = op.matrix();
  std::size_t lower = 0;
  for (Eigen::Index r = 0; r < L.outerSize(); ++r)
    for (SparseRowMatrix::InnerIterator it(L, r); it; ++it)
      if (it.col() <= r) ++lower;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << "% graph Laplacian, scale=" << std::setprecision(17) << op.scale() << " eps=" << op.eps()
      << " m=" << op.intrinsic_dim() << "\n";
  out << L.rows() << " " << L.cols() << " " << lower << "\n";
  for (Eigen::Index r = 0; r < L.outerSize(); ++r)
    for (SparseRowMatrix::InnerIterator it(L, r); it; ++it)
      if (it.col() <= r) out << r + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

}  // namespace glclt
