#include "glclt/quadrature.hpp"

#include "glclt/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace glclt {

namespace {

constexpr double kPi = std::numbers::pi;

// Unit-radius sphere S^m as rows of `nodes` (dimension m + 1) and weights.
void unit_sphere_rule(int m, int n_polar, int n_azimuth, std::vector<std::vector<double>>& nodes,
                      std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  if (m == 1) {
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5) / n_azimuth;
      nodes.push_back({std::cos(phi), std::sin(phi)});
      weights.push_back(2.0 * kPi / n_azimuth);
    }
    return;
  }
  // x_0 = t, remaining coordinates sqrt(1 - t^2) y with y on S^{m-1};
  // the measure is (1 - t^2)^{(m-2)/2} dt dsigma_{m-1}.
  std::vector<double> t, wt;
  gegenbauer_rule(n_polar, 0.5 * (m - 2), t, wt);
  std::vector<std::vector<double>> sub;
  std::vector<double> subw;
  unit_sphere_rule(m - 1, n_polar, n_azimuth, sub, subw);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
    for (std::size_t k = 0; k < sub.size(); ++k) {
      std::vector<double> x(static_cast<std::size_t>(m) + 1);
      // Keep the polar axis last so the 2-sphere grid is the usual (theta, phi) grid.
      for (int c = 0; c < m; ++c) x[c] = s * sub[k][c];
      x[m] = t[i];
      nodes.push_back(std::move(x));
      weights.push_back(wt[i] * subw[k]);
    }
  }
}

}  // namespace

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 32) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

void gegenbauer_rule(int count, double a, std::vector<double>& nodes, std::vector<double>& weights) {
  require(count >= 1, ErrorCode::InvalidArgument, "quadrature needs at least one node");
  require(a > -1, ErrorCode::InvalidArgument, "weight exponent must exceed -1");
  // Monic recurrence for the Gegenbauer family with lambda = a + 1/2.
  const double lam = a + 0.5;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    const double beta = k * (k + 2.0 * lam - 1.0) / (4.0 * (k + lam) * (k + lam - 1.0));
    J(k, k - 1) = J(k - 1, k) = std::sqrt(beta);
  }
  const double mu0 = std::sqrt(kPi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(count);
  weights.resize(count);
  for (int i = 0; i < count; ++i) {
    nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

double QuadratureGrid::total_weight() const {
  return pairwise_sum(weights.data(), size());
}

QuadratureGrid QuadratureGrid::build(const ManifoldSpec& spec, std::vector<int> res) {
  QuadratureGrid grid;
  grid.manifold = spec.describe();
  const int d = spec.ambient_dim();
  std::vector<std::vector<double>> pts;
  std::vector<double> w;

  if (const auto* c = spec.get_if<Circle>()) {
    if (res.empty()) res = {4096};
    const int N = res[0];
    for (int j = 0; j < N; ++j) {
      const double th = 2.0 * kPi * (j + 0.5) / N;
      pts.push_back({c->radius * std::cos(th), c->radius * std::sin(th)});
      w.push_back(2.0 * kPi * c->radius / N);
    }
  } else if (const auto* e = spec.get_if<Ellipse>()) {
    if (res.empty()) res = {4096};
    const int N = res[0];
    const EllipseArcLength arc(e->semi_axis_a, e->semi_axis_b);
    for (int j = 0; j < N; ++j) {
      const double t = arc.t_of_s(arc.perimeter() * (j + 0.5) / N);
      pts.push_back({e->semi_axis_a * std::cos(t), e->semi_axis_b * std::sin(t)});
      w.push_back(arc.perimeter() / N);
    }
  } else if (const auto* s = spec.get_if<Sphere>()) {
    if (res.empty()) res = s->dim == 1 ? std::vector<int>{4096, 4096}
                          : s->dim == 2 ? std::vector<int>{256, 512}
                                        : std::vector<int>{32, 64};
    if (res.size() == 1) res.push_back(2 * res[0]);
    unit_sphere_rule(s->dim, res[0], res[1], pts, w);
    const double rm = std::pow(s->radius, s->dim);
    for (auto& p : pts)
      for (double& x : p) x *= s->radius;
    for (double& x : w) x *= rm;
  } else if (const auto* t = spec.get_if<FlatTorus>()) {
    const std::size_t m = t->side_lengths.size();
    if (res.empty()) res = {256};
    if (res.size() == 1) res.assign(m, res[0]);
    require(res.size() == m, ErrorCode::InvalidArgument, "one resolution per torus factor");
    std::vector<int> idx(m, 0);
    while (true) {
      std::vector<double> x(2 * m);
      double weight = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = t->side_lengths[i] / (2.0 * kPi);
        const double th = 2.0 * kPi * (idx[i] + 0.5) / res[i];
        x[2 * i] = r * std::cos(th);
        x[2 * i + 1] = r * std::sin(th);
        weight *= t->side_lengths[i] / res[i];
      }
      pts.push_back(std::move(x));
      w.push_back(weight);
      std::size_t k = 0;
      while (k < m && ++idx[k] == res[k]) idx[k++] = 0;
      if (k == m) break;
    }
  } else if (const auto* tor = spec.get_if<EmbeddedTorus>()) {
    if (res.empty()) res = {512, 512};
    if (res.size() == 1) res.push_back(res[0]);
    const double R = tor->major_radius, r = tor->minor_radius;
    for (int i = 0; i < res[0]; ++i) {
      const double th = 2.0 * kPi * (i + 0.5) / res[0];
      for (int j = 0; j < res[1]; ++j) {
        const double phi = 2.0 * kPi * (j + 0.5) / res[1];
        const double rho = R + r * std::cos(phi);
        pts.push_back({rho * std::cos(th), rho * std::sin(th), r * std::sin(phi)});
        w.push_back(r * rho * (2.0 * kPi / res[0]) * (2.0 * kPi / res[1]));
      }
    }
  }

  grid.resolution = res;
  grid.nodes.resize(static_cast<Eigen::Index>(pts.size()), d);
  grid.weights.resize(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int j = 0; j < d; ++j) grid.nodes(static_cast<Eigen::Index>(i), j) = pts[i][j];
    grid.weights[static_cast<Eigen::Index>(i)] = w[i];
  }
  return grid;
}

QuadratureGrid QuadratureGrid::refined(const ManifoldSpec& spec) const {
  require(spec.describe() == manifold, ErrorCode::GridMismatch, "grid built for " + manifold);
  std::vector<int> res = resolution;
  for (int& r : res) r *= 2;
  return build(spec, res);
}

double integrate(const QuadratureGrid& grid,
                 const std::function<double(std::span<const double>)>& f) {
  std::vector<double> terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    terms[i] = grid.weights[static_cast<Eigen::Index>(i)] * f(grid.node(i));
  return pairwise_sum(terms.data(), terms.size());
}

}  // namespace glclt
