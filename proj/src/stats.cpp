#include "glclt/stats.hpp"

#include "glclt/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>

namespace glclt {

namespace {

double poly(const double* c, int nord, double x) {
  double r = c[nord - 1];
  for (int i = nord - 2; i >= 0; --i) r = r * x + c[i];
  return r;
}

double median_sorted(const std::vector<double>& s) {
  const std::size_t n = s.size();
  return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

}  // namespace

SampleSummary summarize(const std::vector<double>& x) {
  require(!x.empty(), ErrorCode::InvalidArgument, "empty sample");
  SampleSummary s;
  s.n = x.size();
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(s.n);
  double ss = 0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.variance = s.n > 1 ? ss / static_cast<double>(s.n - 1) : 0.0;
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = median_sorted(sorted);
  std::vector<double> dev;
  dev.reserve(s.n);
  for (double v : x) dev.push_back(std::abs(v - s.median));
  std::sort(dev.begin(), dev.end());
  s.mad = median_sorted(dev);
  return s;
}

double quantile(std::vector<double> x, double q) {
  require(!x.empty(), ErrorCode::InvalidArgument, "empty sample");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  require(p > 0 && p < 1, ErrorCode::InvalidArgument, "probability must lie in (0, 1)");
  // Wichura (1988), AS 241 PPND16.
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0 ? -val : val;
}

ShapiroWilk shapiro_wilk(std::vector<double> x) {
  const int n = static_cast<int>(x.size());
  require(n >= 3 && n <= 5000, ErrorCode::InvalidArgument,
          "Shapiro-Wilk supports 3 <= n <= 5000");
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 1e-19 * std::max(1.0, std::abs(x.front()))))
    throw Error(ErrorCode::ZeroVariance, "Shapiro-Wilk needs a non-constant sample");

  static const double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static const double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static const double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static const double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static const double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static const double c6[] = {-0.4803, -0.082676, 0.0030302};
  static const double g[] = {-2.273, 0.459};

  // Coefficients for the upper half; a[i] pairs x[n-1-i] with x[i].
  const int nn2 = n / 2;
  std::vector<double> a(static_cast<std::size_t>(nn2));
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    const double an25 = n + 0.25;
    std::vector<double> m(static_cast<std::size_t>(nn2));
    double summ2 = 0;
    for (int i = 0; i < nn2; ++i) {
      m[i] = normal_quantile((i + 1 - 0.375) / an25);  // negative
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
    const double a1 = poly(c1, 6, rsn) - m[0] / ssumm2;
    int i1;
    double fac;
    if (n > 5) {
      i1 = 2;
      const double a2 = -m[1] / ssumm2 + poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      i1 = 1;
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (int i = i1; i < nn2; ++i) a[i] = -m[i] / fac;
  }

  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ssq = 0;
  for (double v : x) ssq += (v - mean) * (v - mean);
  double num = 0;
  for (int i = 0; i < nn2; ++i) num += a[i] * (x[n - 1 - i] - x[i]);
  double w = num * num / ssq;
  w = std::min(w, 1.0);

  ShapiroWilk out;
  out.w = w;
  if (n == 3) {
    const double pi6 = 6.0 / std::numbers::pi, stqr = std::numbers::pi / 3.0;
    out.p_value = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    return out;
  }
  const double w1 = std::log(1.0 - w);
  const double xx = std::log(static_cast<double>(n));
  double m, s, y;
  if (n <= 11) {
    const double gamma = poly(g, 2, n);
    if (w1 >= gamma) {
      out.p_value = 1e-99;
      return out;
    }
    y = -std::log(gamma - w1);
    m = poly(c3, 4, n);
    s = std::exp(poly(c4, 4, n));
  } else {
    y = w1;
    m = poly(c5, 4, xx);
    s = std::exp(poly(c6, 3, xx));
  }
  out.p_value = 1.0 - normal_cdf((y - m) / s);
  return out;
}

double silverman_bandwidth(const std::vector<double>& x) {
  const SampleSummary s = summarize(x);
  const double sd = std::sqrt(s.variance);
  const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
  double spread = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;
  if (!(spread > 0)) throw Error(ErrorCode::ZeroVariance, "KDE needs a sample with spread");
  return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

double KdeCurve::mass() const {
  double m = 0;
  for (std::size_t i = 1; i < x.size(); ++i) m += 0.5 * (density[i] + density[i - 1]) * (x[i] - x[i - 1]);
  return m;
}

KdeCurve kde(const std::vector<double>& samples, std::optional<double> bandwidth, int grid_points) {
  require(samples.size() >= 2, ErrorCode::InvalidArgument, "KDE needs at least two samples");
  require(grid_points >= 2, ErrorCode::InvalidArgument, "KDE grid needs two points");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(samples);
  require(h > 0, ErrorCode::InvalidArgument, "bandwidth must be positive");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 4 * h, hi = *hi_it + 4 * h;
  KdeCurve c;
  c.bandwidth = h;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (int k = 0; k < grid_points; ++k) {
    const double t = lo + (hi - lo) * k / (grid_points - 1);
    double s = 0;
    for (double v : samples) {
      const double z = (t - v) / h;
      s += std::exp(-0.5 * z * z);
    }
    c.x.push_back(t);
    c.density.push_back(s * norm);
  }
  return c;
}

std::vector<std::pair<double, double>> qq_points(const std::vector<double>& samples) {
  require(samples.size() >= 2, ErrorCode::InvalidArgument, "QQ data needs at least two samples");
  std::vector<double> s = samples;
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    out.emplace_back(normal_quantile((static_cast<double>(i) + 0.5) / n), s[i]);
  return out;
}

double qq_max_deviation(const std::vector<double>& standardized) {
  double worst = 0;
  for (const auto& [q, v] : qq_points(standardized)) worst = std::max(worst, std::abs(v - q));
  return worst;
}

CovCorr empirical_cov_corr(const Eigen::MatrixXd& X) {
  require(X.rows() >= 2, ErrorCode::InvalidArgument, "covariance needs at least two repetitions");
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd C = X.rowwise() - mean;
  CovCorr out;
  out.covariance = C.transpose() * C / static_cast<double>(X.rows() - 1);
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  const auto L = out.covariance.rows();
  out.correlation = out.covariance;
  out.undefined.assign(static_cast<std::size_t>(L), false);
  for (Eigen::Index a = 0; a < L; ++a) out.undefined[a] = !(out.covariance(a, a) > 0);
  for (Eigen::Index a = 0; a < L; ++a)
    for (Eigen::Index b = 0; b < L; ++b) {
      if (out.undefined[a] || out.undefined[b]) {
        out.correlation(a, b) = std::nan("");
      } else if (a == b) {
        out.correlation(a, b) = 1.0;
      } else {
        const double r = out.covariance(a, b) / std::sqrt(out.covariance(a, a) * out.covariance(b, b));
        out.correlation(a, b) = std::clamp(r, -1.0, 1.0);
      }
    }
  return out;
}

ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                         int fitted_parameters) {
  require(observed.size() == expected.size() && observed.size() >= 2, ErrorCode::InvalidArgument,
          "chi-square needs matching bins (>= 2)");
  ChiSquare c;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    require(expected[i] > 0, ErrorCode::InvalidArgument, "expected counts must be positive");
    const double d = observed[i] - expected[i];
    c.statistic += d * d / expected[i];
  }
  c.dof = static_cast<int>(observed.size()) - 1 - fitted_parameters;
  require(c.dof >= 1, ErrorCode::InvalidArgument, "no degrees of freedom left");
  c.p_value = boost::math::gamma_q(0.5 * c.dof, 0.5 * c.statistic);
  return c;
}

void write_kde_csv(const KdeCurve& curve, std::ostream& out) {
  out << "x,density\n" << std::setprecision(17);
  for (std::size_t i = 0; i < curve.x.size(); ++i) out << curve.x[i] << "," << curve.density[i] << "\n";
}

void write_qq_csv(const std::vector<std::pair<double, double>>& points, std::ostream& out) {
  out << "theoretical,sample\n" << std::setprecision(17);
  for (const auto& [q, v] : points) out << q << "," << v << "\n";
}

}  // namespace glclt
