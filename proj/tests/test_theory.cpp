#include "glclt/error.hpp"
#include "glclt/graph.hpp"
#include "glclt/kernel.hpp"
#include "glclt/quadrature.hpp"
#include "glclt/theory.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <numbers>
#include <sstream>

using namespace glclt;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

AnalyticSpectrum raw_spectrum(const ManifoldSpec& s, int l_max) {
  return analytic_spectrum(DensityModel::uniform(s), LimitScaling::raw(indicator_sigma_eta(s.intrinsic_dim())),
                           l_max);
}

AnalyticSpectrum lb_spectrum(const ManifoldSpec& s, int l_max) {
  const auto model = DensityModel::uniform(s);
  return analytic_spectrum(model, LimitScaling::laplace_beltrami(model), l_max);
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("quadrature weights are positive and sum to the volume") {
  for (const ManifoldSpec& s : std::vector<ManifoldSpec>{Circle{1.5}, Ellipse{1.0, std::numbers::sqrt2},
                                                         Sphere{2, 2.0}, Sphere{3, 1.0}, Sphere{4, 1.0},
                                                         EmbeddedTorus{2.0, 1.0}, FlatTorus{{1.0, 2.0}}}) {
    const auto g = QuadratureGrid::build(s);
    CHECK(g.weights.minCoeff() > 0);
    CHECK(std::abs(g.total_weight() - s.volume()) < 1e-8 * std::max(1.0, s.volume()));
  }
}

TEST_CASE("Gegenbauer rule integrates polynomials exactly") {
  std::vector<double> t, w;
  gegenbauer_rule(6, 0.5, t, w);  // weight sqrt(1 - t^2)
  double s0 = 0, s2 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    s0 += w[i];
    s2 += w[i] * t[i] * t[i];
  }
  CHECK(s0 == Approx(kPi / 2).epsilon(1e-14));
  CHECK(s2 == Approx(kPi / 8).epsilon(1e-14));
}

TEST_CASE("grid mismatch is rejected") {
  const auto s = raw_spectrum(Circle{1.0}, 3);
  const auto g = QuadratureGrid::build(Circle{2.0});
  CHECK_THROWS_AS(sigma_sq_quadrature(s.model, s.at(2), g), Error);
}

TEST_CASE("sigma squared basics on the circle") {
  const auto s = raw_spectrum(Circle{1.0}, 5);
  const auto g = QuadratureGrid::build(Circle{1.0});
  CHECK(sigma_sq_quadrature(s.model, s.at(1), g) == 0.0);
  // Closed form under raw indicator scaling: the integrand is -cos(2 theta)/(2 pi).
  CHECK(sigma_sq_quadrature(s.model, s.at(2), g) == Approx(1 / (8 * kPi * kPi)).epsilon(1e-12));
  CHECK(covariance_quadrature(s.model, s.at(3), s.at(3), g) == sigma_sq_quadrature(s.model, s.at(3), g));
  const double c23 = covariance_quadrature(s.model, s.at(2), s.at(3), g);
  const double r = c23 / std::sqrt(sigma_sq_quadrature(s.model, s.at(2), g) * sigma_sq_quadrature(s.model, s.at(3), g));
  CHECK(r <= 0.0);
}

TEST_CASE("Table 1: sphere values in the Laplace-Beltrami convention") {
  const auto s = lb_spectrum(Sphere{2, 1.0}, 16);
  const auto g = QuadratureGrid::build(Sphere{2, 1.0});
  std::vector<double> v;
  for (int l = 2; l <= 16; ++l) v.push_back(sigma_sq_quadrature(s.model, s.at(l), g));
  // degree 1 (orders -1, 0, 1), degree 2 (orders -2..2), degree 3 (orders -3..3)
  CHECK(v[0] == Approx(12.800).epsilon(1e-4));
  CHECK(v[1] == Approx(12.800).epsilon(1e-4));
  CHECK(v[3] == Approx(144.003).epsilon(1e-4));
  CHECK(v[4] == Approx(144.001).epsilon(1e-4));
  CHECK(v[5] == Approx(144.000).epsilon(1e-4));
  CHECK(v[8] == Approx(760.635).epsilon(1e-4));
  CHECK(v[9] == Approx(502.162).epsilon(1e-4));
  CHECK(v[10] == Approx(719.264).epsilon(1e-4));
  CHECK(v[11] == Approx(667.569).epsilon(1e-4));
}

TEST_CASE("grid refinement changes sigma squared by less than 1e-4") {
  struct Case {
    ManifoldSpec s;
    int l;
  };
  for (const auto& c : std::vector<Case>{{Circle{1.0}, 2}, {Ellipse{1.0, std::numbers::sqrt2}, 4},
                                         {Sphere{2, 1.0}, 7}, {FlatTorus{{2 * kPi, 2 * kPi}}, 5}}) {
    const auto s = raw_spectrum(c.s, c.l);
    const auto g = QuadratureGrid::build(c.s);
    const double a = sigma_sq_quadrature(s.model, s.at(c.l), g);
    const double b = sigma_sq_quadrature(s.model, s.at(c.l), g.refined(c.s));
    CHECK(std::abs(a - b) < 1e-4 * std::abs(b));
  }
}

TEST_CASE("Fisher-Rao gradient, perturbation derivative and Cramer-Rao bound") {
  const auto s = raw_spectrum(Circle{1.0}, 3);
  const auto g = QuadratureGrid::build(Circle{1.0});
  for (double th : {0.1, 2.0}) CHECK(fisher_rao_gradient(s.model, s.at(1), std::vector<double>{std::cos(th), std::sin(th)}) == 0.0);
  CHECK(perturbation_derivative(s.model, s.at(2), [](auto) { return 0.0; }, g) == 0.0);
  const double d = perturbation_derivative(s.model, s.at(2), [](auto x) { return x[0]; }, g);
  CHECK(std::abs(d) < 1e-14);
  CHECK_THROWS_AS(perturbation_derivative(s.model, s.at(2), [](auto) { return 1.0; }, g), Error);

  CHECK(cramer_rao_bound(0.0, 17) == 0.0);
  CHECK(cramer_rao_bound(2.0, 1000) == 2 * cramer_rao_bound(2.0, 2000));
  const double s2 = sigma_sq_quadrature(s.model, s.at(2), g);
  CHECK(cramer_rao_bound(s2, 5000) == Approx(s2 / 5000));
}

TEST_CASE("pointwise consistency residual") {
  const auto spectrum = raw_spectrum(Circle{1.0}, 3);
  PointCloud far;
  far.intrinsic_dim = 1;
  far.points.resize(2, 2);
  far.points << 1, 0, -1, 0;
  const auto op = assemble_laplacian(build_eps_graph(far, 0.1, Kernel::indicator(1)), 1);
  double expect = 0;
  for (std::size_t i = 0; i < 2; ++i)
    expect = std::max(expect, std::abs(spectrum.at(3).eigenvalue * spectrum.at(3).value(far.point(i))));
  CHECK(pointwise_consistency_residual(op, far, spectrum, 3) == Approx(expect).epsilon(1e-15));
  CHECK(pointwise_consistency_residual(op, far, spectrum, 1) == 0.0);

  const auto normalized = analytic_spectrum(spectrum.model, LimitScaling::normalized(), 3);
  CHECK_THROWS_AS(pointwise_consistency_residual(op, far, normalized, 2), Error);
}

TEST_CASE("bias magnitude") {
  CHECK(bias_magnitude(0.5, 0.5, 100, 30) == 0.0);
  CHECK(bias_magnitude(0.6, 0.5, 100, 30) == Approx(1.0));
  CHECK_THROWS_AS(bias_magnitude(0.6, 0.5, 100, 29), Error);
}

TEST_CASE("covariance matrix is symmetric PSD with sigma squared on the diagonal") {
  const auto s = raw_spectrum(Sphere{2, 1.0}, 16);
  const auto g = QuadratureGrid::build(Sphere{2, 1.0}, {64, 128});
  std::vector<int> idx;
  for (int l = 2; l <= 16; ++l) idx.push_back(l);
  const auto C = covariance_matrix(s, idx, g);
  CHECK((C - C.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t k = 0; k < idx.size(); ++k)
    CHECK(C(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) ==
          Approx(sigma_sq_quadrature(s.model, s.at(idx[k]), g)).epsilon(1e-12));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("eigenspace sum of sigma squared under rotations") {
  const auto g = QuadratureGrid::build(Sphere{2, 1.0});
  const auto s = raw_spectrum(Sphere{2, 1.0}, 16);
  auto sum_over = [&](const std::vector<AnalyticEigenpair>& basis) {
    double t = 0;
    for (const auto& p : basis) t += sigma_sq_quadrature(s.model, p, g);
    return t;
  };
  for (int cluster : {1, 2}) {
    std::vector<AnalyticEigenpair> basis;
    for (int l : s.cluster_indices(cluster)) basis.push_back(s.at(l));
    const double base = sum_over(basis);
    const auto Q = testing::random_orthogonal(static_cast<int>(basis.size()), 40 + cluster);
    CHECK(std::abs(sum_over(rotate_eigenspace(basis, Q)) - base) < 1e-6 * base);
  }
  // Degree 3 mixes seven harmonics and the sum is not preserved.
  std::vector<AnalyticEigenpair> basis;
  for (int l : s.cluster_indices(3)) basis.push_back(s.at(l));
  const double base = sum_over(basis);
  const auto Q = testing::random_orthogonal(7, 3);
  CHECK(std::abs(sum_over(rotate_eigenspace(basis, Q)) - base) > 1e-3 * base);
  CHECK_THROWS_AS(rotate_eigenspace({s.at(2), s.at(5)}, Eigen::MatrixXd::Identity(2, 2)), Error);
}

TEST_CASE("theory report JSON") {
  const auto s = raw_spectrum(Circle{1.0}, 5);
  const auto rep = compute_theory_report(s, {2, 3, 4, 5}, QuadratureGrid::build(Circle{1.0}), 5000);
  CHECK(rep.sigma_sq.size() == 4);
  CHECK(rep.cramer_rao[0] == Approx(rep.sigma_sq[0] / 5000));
  std::stringstream out;
  write_theory_json(rep, out);
  CHECK(out.str().find("\"schema_version\": 1") != std::string::npos);
  std::stringstream csv;
  write_matrix_csv(rep.correlation, rep.labels, csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("label,", 0) == 0);
}

}  // TEST_SUITE
