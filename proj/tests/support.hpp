#pragma once

// Independent oracles shared by the unit tests and the acceptance binary.

#include "glclt/graph.hpp"
#include "glclt/manifolds.hpp"
#include "glclt/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <tuple>
#include <vector>

namespace glclt::testing {

inline PointCloud random_cloud(std::size_t n, int d, int m, std::uint64_t seed, double box = 1.0) {
  PointCloud c;
  c.intrinsic_dim = m;
  c.points.resize(static_cast<Eigen::Index>(n), d);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) c.points(static_cast<Eigen::Index>(i), j) = box * rng.uniform();
  return c;
}

inline double distance(const PointCloud& c, std::size_t i, std::size_t j) {
  return (c.points.row(static_cast<Eigen::Index>(i)) - c.points.row(static_cast<Eigen::Index>(j))).norm();
}

/// All pairs i < j with |x_i - x_j| <= eps, with weight eta(|x_i - x_j| / eps).
inline std::vector<std::tuple<int, int, double>> brute_force_edges(const PointCloud& c, double eps,
                                                                   const Kernel& k) {
  std::vector<std::tuple<int, int, double>> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double d = distance(c, i, j);
      if (d <= eps) out.emplace_back(static_cast<int>(i), static_cast<int>(j), k.weight(d / eps));
    }
  return out;
}

/// Dense Delta_n straight from the double sum definition.
inline Eigen::MatrixXd dense_laplacian(const PointCloud& c, double eps, const Kernel& k, int m) {
  const auto n = static_cast<Eigen::Index>(c.size());
  const double s = 1.0 / (static_cast<double>(n) * std::pow(eps, m + 2));
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = distance(c, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (d > eps) continue;
      const double w = k.weight(d / eps);
      L(i, i) += s * w;
      L(i, j) -= s * w;
    }
  return L;
}

/// Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13, int depth = 40) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double a0, double b0, double fa, double fm, double fb, double whole, int d) {
        const double m0 = 0.5 * (a0 + b0);
        const double lm = 0.5 * (a0 + m0), rm = 0.5 * (m0 + b0);
        const double flm = f(lm), frm = f(rm);
        const double left = (m0 - a0) / 6 * (fa + 4 * flm + fm);
        const double right = (b0 - m0) / 6 * (fm + 4 * frm + fb);
        if (d <= 0 || std::abs(left + right - whole) <= 15 * tol)
          return left + right + (left + right - whole) / 15;
        return rec(a0, m0, fa, flm, fm, left, d - 1) + rec(m0, b0, fm, frm, fb, right, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), depth);
}

/// Ordinary least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto k = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

/// Uniformly random orthogonal k x k matrix (QR of a Gaussian matrix with sign fix).
inline Eigen::MatrixXd random_orthogonal(int k, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXd A(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) A(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < k; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1;
  return Q;
}

}  // namespace glclt::testing
