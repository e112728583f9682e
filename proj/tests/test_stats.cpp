#include "glclt/error.hpp"
#include "glclt/rng.hpp"
#include "glclt/stats.hpp"

#include <doctest.h>

#include <numbers>
#include <sstream>

using namespace glclt;
using doctest::Approx;

namespace {

std::vector<double> normal_scores(int n) {
  std::vector<double> x;
  for (int i = 1; i <= n; ++i) x.push_back(normal_quantile((i - 0.375) / (n + 0.25)));
  return x;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("summary statistics") {
  const auto s = summarize({3.0, 1.0, 2.0, 10.0});
  CHECK(s.n == 4);
  CHECK(s.mean == 4.0);
  CHECK(s.variance == Approx(50.0 / 3.0));
  CHECK(s.median == 2.5);
  CHECK(s.mad == 1.0);  // |x - 2.5| = 0.5, 1.5, 0.5, 7.5
  CHECK(s.min == 1.0);
  CHECK(s.max == 10.0);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
}

TEST_CASE("normal quantile and CDF") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-14));
  for (double p : {1e-10, 0.01, 0.3, 0.77, 0.999999})
    CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-9 * std::max(p, 1e-6));
  CHECK_THROWS_AS(normal_quantile(0.0), Error);
}

TEST_CASE("Shapiro-Wilk: published example and reference values") {
  // Royston (1995), AS R94 test data.
  const std::vector<double> x{.139, .157, .175, .256, .344, .413, .503, .577, .614,
                              .655, .954, 1.392, 1.557, 1.648, 1.690, 1.994, 2.174, 2.206,
                              3.245, 3.510, 3.571, 4.354, 4.980, 6.084, 8.351};
  const auto r = shapiro_wilk(x);
  CHECK(r.w == Approx(0.83467).epsilon(1e-5));
  CHECK(r.p_value == Approx(0.000914).epsilon(2e-3));

  // Reference values from scipy.stats.shapiro on the same generated samples.
  CounterRng u(12345);
  std::vector<double> uni;
  for (int i = 0; i < 1000; ++i) uni.push_back(u.uniform());
  const auto ru = shapiro_wilk(uni);
  CHECK(ru.w == Approx(0.9591455134511853).epsilon(1e-7));
  CHECK(ru.p_value < 0.01);

  CounterRng g(777);
  std::vector<double> nor;
  for (int i = 0; i < 60; ++i) nor.push_back(g.normal());
  const auto rn = shapiro_wilk(nor);
  CHECK(rn.w == Approx(0.9922736790945679).epsilon(1e-8));
  CHECK(rn.p_value == Approx(0.9692552505212022).epsilon(1e-6));
}

TEST_CASE("Shapiro-Wilk: normal scores, constants, range, affine invariance") {
  CHECK(shapiro_wilk(normal_scores(100)).w > 0.999);
  CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(20, 1.5)), Error);
  CHECK_THROWS_AS(shapiro_wilk({1.0, 2.0}), Error);
  CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(5001, 0.0)), Error);
  CounterRng g(5);
  std::vector<double> x, y;
  for (int i = 0; i < 300; ++i) {
    x.push_back(g.normal() + 0.3 * g.uniform());
    y.push_back(-4.0 * x.back() + 17.0);
  }
  CHECK(std::abs(shapiro_wilk(x).w - shapiro_wilk(y).w) < 1e-10);
}

TEST_CASE("KDE") {
  const auto c = kde({-1.0, 1.0}, 1.0);
  // value at 0: mean of two N(+-1, 1) densities = phi(1)
  double at0 = 0;
  for (std::size_t i = 0; i + 1 < c.x.size(); ++i)
    if (c.x[i] <= 0 && c.x[i + 1] > 0) {
      const double t = -c.x[i] / (c.x[i + 1] - c.x[i]);
      at0 = (1 - t) * c.density[i] + t * c.density[i + 1];
    }
  CHECK(at0 == Approx(normal_pdf(1.0)).epsilon(1e-4));
  CHECK(c.mass() == Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(kde({2.0, 2.0, 2.0}), Error);
  CHECK_THROWS_AS(kde({2.0}), Error);

  CounterRng g(11);
  std::vector<double> s;
  for (int i = 0; i < 5000; ++i) s.push_back(g.normal());
  const auto k = kde(s);
  CHECK(k.mass() == Approx(1.0).epsilon(1e-3));
  double sup = 0;
  for (std::size_t i = 0; i < k.x.size(); ++i) sup = std::max(sup, std::abs(k.density[i] - normal_pdf(k.x[i])));
  CHECK(sup < 0.05);
}

TEST_CASE("QQ points") {
  const int n = 51;
  std::vector<double> z;
  for (int i = 1; i <= n; ++i) z.push_back(normal_quantile((i - 0.5) / n));
  const auto q = qq_points(z);
  for (const auto& [t, s] : q) CHECK(std::abs(t - s) < 1e-6);
  CHECK(std::abs(q[n / 2].first) < 1e-15);
  for (std::size_t i = 1; i < q.size(); ++i) {
    CHECK(q[i].first > q[i - 1].first);
    CHECK(q[i].second >= q[i - 1].second);
  }
  CHECK(qq_max_deviation(z) < 1e-6);
  CHECK_THROWS_AS(qq_points({1.0}), Error);
}

TEST_CASE("empirical covariance and correlation") {
  Eigen::MatrixXd X(5, 2);
  X << 1, 1, 2, 2, 3, 3, 4, 4, 7, 7;
  const auto cc = empirical_cov_corr(X);
  CHECK(cc.correlation(0, 1) == Approx(1.0).epsilon(1e-15));
  CHECK((cc.covariance - cc.covariance.transpose()).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd one(4, 1);
  one << 1, 2, 3, 4;
  CHECK(empirical_cov_corr(one).covariance(0, 0) == Approx(5.0 / 3.0));

  Eigen::MatrixXd zero(3, 2);
  zero << 1, 5, 2, 5, 3, 5;
  const auto z = empirical_cov_corr(zero);
  CHECK(z.undefined[1]);
  CHECK_FALSE(z.undefined[0]);
  CHECK(std::isnan(z.correlation(0, 1)));

  CounterRng g(8);
  Eigen::MatrixXd N(10000, 3);
  for (Eigen::Index i = 0; i < N.rows(); ++i)
    for (int j = 0; j < 3; ++j) N(i, j) = g.normal();
  const auto nc = empirical_cov_corr(N);
  for (int a = 0; a < 3; ++a) {
    CHECK(nc.correlation(a, a) == Approx(1.0).epsilon(1e-14));
    for (int b = a + 1; b < 3; ++b) CHECK(std::abs(nc.correlation(a, b)) < 0.05);
  }
  CHECK_THROWS_AS(empirical_cov_corr(Eigen::MatrixXd(1, 2)), Error);
}

TEST_CASE("chi-square goodness of fit") {
  // statistic = (4 + 4) / 10 = 0.8 with one degree of freedom: p = erfc(sqrt(0.4))
  const auto r = chi_square_gof({12, 8}, {10, 10});
  CHECK(r.statistic == Approx(0.8));
  CHECK(r.dof == 1);
  CHECK(r.p_value == Approx(std::erfc(std::sqrt(0.4))).epsilon(1e-12));
}

TEST_CASE("CSV writers") {
  std::stringstream a, b;
  write_kde_csv(kde({0.0, 1.0, 3.0}), a);
  write_qq_csv(qq_points({0.0, 1.0, 3.0}), b);
  std::string ha, hb;
  std::getline(a, ha);
  std::getline(b, hb);
  CHECK(ha == "x,density");
  CHECK(hb == "theoretical,sample");
}

}  // TEST_SUITE
