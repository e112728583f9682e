#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace glclt {

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double median = 0.0;
  double mad = 0.0;  // median absolute deviation from the median (unscaled)
  double min = 0.0;
  double max = 0.0;
};

SampleSummary summarize(const std::vector<double>& samples);

struct ShapiroWilk {
  double w = 0.0;
  double p_value = 0.0;
};

/// Royston's AS R94 algorithm; 3 <= n <= 5000.
ShapiroWilk shapiro_wilk(std::vector<double> samples);

/// Standard normal CDF and its inverse (Wichura AS 241, relative error ~1e-16).
double normal_cdf(double z);
double normal_quantile(double p);

struct KdeCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;

  /// Trapezoidal mass of the curve on its grid.
  double mass() const;
};

/// Gaussian KDE on `grid_points` equally spaced points covering
/// [min - 4h, max + 4h]. Default bandwidth: 0.9 min(sd, IQR/1.34) n^{-1/5}.
KdeCurve kde(const std::vector<double>& samples, std::optional<double> bandwidth = std::nullopt,
             int grid_points = 512);
double silverman_bandwidth(const std::vector<double>& samples);

/// (normal quantile of (i - 0.5)/n, i-th order statistic).
std::vector<std::pair<double, double>> qq_points(const std::vector<double>& samples);
/// max_i |order statistic - theoretical quantile|.
double qq_max_deviation(const std::vector<double>& standardized);

struct CovCorr {
  Eigen::MatrixXd covariance;   // unbiased
  Eigen::MatrixXd correlation;  // NaN rows/cols for zero-variance columns
  std::vector<bool> undefined;  // per column
};

/// Rows are repetitions, columns are variables.
CovCorr empirical_cov_corr(const Eigen::MatrixXd& samples);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/// Pearson goodness of fit; dof = bins - 1 - fitted_parameters.
ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                         int fitted_parameters = 0);

double quantile(std::vector<double> samples, double q);  // linear interpolation (type 7)

void write_kde_csv(const KdeCurve& curve, std::ostream& out);
void write_qq_csv(const std::vector<std::pair<double, double>>& points, std::ostream& out);

}  // namespace glclt
