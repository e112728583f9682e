#include "glclt/spectra.hpp"

#include "glclt/error.hpp"
#include "glclt/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace glclt {

namespace {

struct Candidate {
  double value;
  double residual;  // Euclidean, unit vector
  int component;
  Eigen::VectorXd local;  // unit vector on the component
};

// Operator restricted to one component (rows/cols in `members` order).
LaplacianOperator restrict_to(const LaplacianOperator& op, const std::vector<int>& members) {
  std::vector<int> local(op.size(), -1);
  for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<int>(k);
  std::vector<Eigen::Triplet<double, int>> triplets;
  for (int r : members)
    for (SparseRowMatrix::InnerIterator it(op.weights(), r); it; ++it)
      triplets.emplace_back(local[r], local[it.col()], it.value());
  const auto m = static_cast<Eigen::Index>(members.size());
  SparseRowMatrix w(m, m);
  w.setFromTriplets(triplets.begin(), triplets.end());
  return LaplacianOperator(std::move(w), op.scale(), op.n_scale(), op.eps(), op.intrinsic_dim(),
                           op.limit_factor());
}

double gershgorin_bound(const LaplacianOperator& op) {
  return op.size() ? 2.0 * op.scale() * op.degree().maxCoeff() : 0.0;
}

void dense_component(const LaplacianOperator& op, int want, int comp, std::vector<Candidate>& out) {
  const Eigen::MatrixXd A = op.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  require(es.info() == Eigen::Success, ErrorCode::NonConvergence, "dense eigensolver failed");
  for (int i = 0; i < want; ++i) {
    Eigen::VectorXd v = es.eigenvectors().col(i);
    const double res = (A * v - es.eigenvalues()[i] * v).norm();
    out.push_back({es.eigenvalues()[i], res, comp, std::move(v)});
  }
}

// Thick-restart Lanczos with full reorthogonalization on the complement of
// the constant vector (the exact null space of a connected component).
long lanczos_component(const LaplacianOperator& op, int want, int comp, const SolverOptions& opt,
                       double norm_bound, std::vector<Candidate>& out) {
  const auto n = static_cast<Eigen::Index>(op.size());
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  out.push_back({0.0, 0.0, comp, Eigen::VectorXd::Constant(n, inv_sqrt_n)});
  const int nev = want - 1;
  if (nev <= 0) return 0;

  const Eigen::Index space = n - 1;  // dimension of the constant-free subspace
  Eigen::Index maxdim = opt.basis_size > 0 ? opt.basis_size : std::max(2 * nev + 40, 80);
  maxdim = std::min<Eigen::Index>(std::max<Eigen::Index>(maxdim, nev + 2), space);
  const Eigen::Index keep = std::min<Eigen::Index>(nev + (maxdim - nev) / 2, maxdim - 1);
  const long cap = opt.max_matvecs > 0
                       ? opt.max_matvecs
                       : 50L * (nev + 1) * static_cast<long>(std::ceil(std::log(static_cast<double>(n))));

  auto deflate = [&](Eigen::Ref<Eigen::VectorXd> w) { w.array() -= w.mean(); };

  Eigen::MatrixXd V(n, maxdim);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(maxdim, maxdim);
  CounterRng rng(opt.seed, static_cast<std::uint64_t>(comp));
  auto random_unit = [&](Eigen::Index cols) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform() - 0.5;
    deflate(v);
    for (int pass = 0; pass < 2 && cols > 0; ++pass) v -= V.leftCols(cols) * (V.leftCols(cols).transpose() * v);
    return Eigen::VectorXd(v / v.norm());
  };
  V.col(0) = random_unit(0);

  Eigen::VectorXd w(n), r(n);
  double beta_last = 0.0;
  double norm_est = 0.0;
  long matvecs = 0;
  Eigen::Index j = 0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd Y;
  bool converged = false;
  Eigen::Index m = 0;
  while (true) {
    for (; j < maxdim; ++j) {
      op.apply(V.col(j), w);
      ++matvecs;
      auto Vj = V.leftCols(j + 1);
      Eigen::VectorXd h = Vj.transpose() * w;
      w.noalias() -= Vj * h;
      Eigen::VectorXd h2 = Vj.transpose() * w;
      w.noalias() -= Vj * h2;
      h += h2;
      deflate(w);
      T.col(j).head(j + 1) = h;
      T.row(j).head(j + 1) = h.transpose();
      const double beta = w.norm();
      if (j + 1 < maxdim) {
        if (beta <= 1e-13 * std::max(norm_bound, 1e-300)) {
          // Invariant subspace: continue with a fresh orthogonal direction.
          V.col(j + 1) = random_unit(j + 1);
        } else {
          V.col(j + 1) = w / beta;
        }
      } else {
        r = w;
        beta_last = beta;
      }
    }
    m = maxdim;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
    theta = es.eigenvalues();
    Y = es.eigenvectors();
    norm_est = std::max({norm_est, std::abs(theta[0]), std::abs(theta[m - 1])});
    converged = true;
    for (int i = 0; i < nev; ++i)
      if (beta_last * std::abs(Y(m - 1, i)) > opt.tol * norm_est) converged = false;
    if (converged || matvecs >= cap || m == space) break;

    // Restart: keep the `keep` smallest Ritz vectors plus the residual direction.
    Eigen::MatrixXd kept = V * Y.leftCols(keep);
    V.leftCols(keep) = kept;
    T.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) T(i, i) = theta[i];
    V.col(keep) = r / beta_last;
    j = keep;
  }

  const Eigen::MatrixXd ritz = V.leftCols(m) * Y.leftCols(nev);
  Eigen::VectorXd lv(n);
  std::vector<double> worst;
  for (int i = 0; i < nev; ++i) {
    Eigen::VectorXd v = ritz.col(i);
    deflate(v);
    v.normalize();
    op.apply(v, lv);
    const double lambda = v.dot(lv);
    const double res = (lv - lambda * v).norm();
    worst.push_back(res);
    out.push_back({lambda, res, comp, std::move(v)});
  }
  if (!converged && m != space) {
    std::ostringstream os;
    os << "Lanczos stopped after " << matvecs << " products; residuals:";
    for (double x : worst) os << " " << x;
    throw Error(ErrorCode::NonConvergence, os.str());
  }
  return matvecs;
}

}  // namespace

double EigenPairs::value(int l) const {
  require(l >= 1 && l <= count(), ErrorCode::InvalidArgument, "eigen index out of range");
  return values[l - 1];
}

Eigen::VectorXd EigenPairs::vector(int l) const {
  require(l >= 1 && l <= count(), ErrorCode::InvalidArgument, "eigen index out of range");
  return vectors.col(l - 1);
}

EigenPairs smallest_eigenpairs(const LaplacianOperator& op, int count, double tol) {
  SolverOptions opt;
  opt.tol = tol;
  return smallest_eigenpairs(op, count, opt);
}

EigenPairs smallest_eigenpairs(const LaplacianOperator& op, int count, const SolverOptions& opt) {
  const std::size_t n = op.size();
  require(count >= 1, ErrorCode::InvalidArgument, "count must be >= 1");
  require(static_cast<std::size_t>(count) <= n, ErrorCode::InvalidArgument, "count exceeds n");
  require(opt.tol > 0, ErrorCode::InvalidArgument, "tolerance must be positive");

  int ncomp = 0;
  const std::vector<int> comp = op.components(&ncomp);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(ncomp));
  for (std::size_t i = 0; i < n; ++i) members[comp[i]].push_back(static_cast<int>(i));

  EigenPairs result;
  result.norm_estimate = gershgorin_bound(op);
  result.dense = true;
  std::vector<Candidate> cands;
  for (int c = 0; c < ncomp; ++c) {
    const auto& mem = members[c];
    const int want = std::min<int>(count, static_cast<int>(mem.size()));
    const LaplacianOperator sub = ncomp == 1 ? op : restrict_to(op, mem);
    if (mem.size() == 1) {
      cands.push_back({0.0, 0.0, c, Eigen::VectorXd::Ones(1)});
    } else if (mem.size() <= opt.dense_threshold) {
      dense_component(sub, want, c, cands);
    } else {
      result.dense = false;
      result.matvecs += lanczos_component(sub, want, c, opt, gershgorin_bound(sub), cands);
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  cands.resize(static_cast<std::size_t>(count));

  const double root_n = std::sqrt(static_cast<double>(n));
  result.values.resize(count);
  result.residuals.resize(count);
  result.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), count);
  for (int l = 0; l < count; ++l) {
    const auto& c = cands[l];
    const auto& mem = members[c.component];
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < mem.size(); ++k) v[mem[k]] = c.local[static_cast<Eigen::Index>(k)];
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    if (v[at] < 0) v = -v;
    result.vectors.col(l) = root_n * v;
    result.values[l] = c.value;
    result.residuals[l] = c.residual;  // unit-Euclidean residual equals the L2(X_n) residual of the sqrt(n)-scaled vector
  }
  return result;
}

Eigen::VectorXd align_sign(const Eigen::VectorXd& v, const Eigen::VectorXd& reference) {
  require(v.size() == reference.size(), ErrorCode::InvalidArgument, "size mismatch");
  require(v.norm() > 0, ErrorCode::InvalidArgument, "cannot align a zero vector");
  const double ip = v.dot(reference) / static_cast<double>(v.size());
  if (std::abs(ip) <= 1e-14 * v.norm() * reference.norm() / static_cast<double>(v.size()))
    throw Error(ErrorCode::ZeroInnerProduct, "vector is orthogonal to the reference");
  return ip >= 0 ? v : Eigen::VectorXd(-v);
}

double h1_seminorm(const Eigen::VectorXd& f, const LaplacianOperator& op) {
  require(static_cast<std::size_t>(f.size()) == op.size(), ErrorCode::InvalidArgument,
          "size mismatch");
  return std::max(0.0, 2.0 * op.inner(f, f));
}

EigengapReport eigengap_report(const Eigen::VectorXd& values, double threshold) {
  EigengapReport rep;
  rep.threshold = threshold;
  const Eigen::Index L = values.size();
  for (Eigen::Index l = 0; l < L; ++l) {
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < L; ++k)
      if (k != l) g = std::min(g, std::abs(values[k] - values[l]));
    rep.gaps.push_back(g);
    rep.simple.push_back(g > threshold);
  }
  return rep;
}

EigengapReport eigengap_report(const AnalyticSpectrum& spectrum, double threshold) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(spectrum.entries.size()));
  for (std::size_t i = 0; i < spectrum.entries.size(); ++i) v[static_cast<Eigen::Index>(i)] = spectrum.entries[i].eigenvalue;
  EigengapReport rep = eigengap_report(v, threshold);
  // Multiplicities are known exactly even when the list is truncated.
  for (std::size_t i = 0; i < spectrum.entries.size(); ++i)
    if (spectrum.entries[i].multiplicity > 1) {
      rep.gaps[i] = 0.0;
      rep.simple[i] = false;
    }
  return rep;
}

void write_eigenpairs_csv(const EigenPairs& pairs, std::ostream& out, bool dump_vectors) {
  out << "index,value,residual";
  if (dump_vectors)
    for (Eigen::Index i = 0; i < pairs.vectors.rows(); ++i) out << ",v" << i;
  out << "\n" << std::setprecision(17);
  for (int l = 0; l < pairs.count(); ++l) {
    out << l + 1 << "," << pairs.values[l] << "," << pairs.residuals[l];
    if (dump_vectors)
      for (Eigen::Index i = 0; i < pairs.vectors.rows(); ++i) out << "," << pairs.vectors(i, l);
    out << "\n";
  }
}

}  // namespace glclt
