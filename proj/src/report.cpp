#include "glclt/report.hpp"

#include "glclt/error.hpp"
#include "glclt/quadrature.hpp"
#include "glclt/stats.hpp"
#include "glclt/theory.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>

namespace glclt {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(ReportKind k) {
  switch (k) {
    case ReportKind::Normality: return "normality";
    case ReportKind::VarianceRatio: return "variance-ratio";
    case ReportKind::EstimatorRatio: return "estimator-ratio";
    case ReportKind::BiasVsStd: return "bias-vs-std";
    case ReportKind::CovarianceHeatmap: return "covariance-heatmap";
  }
  return "unknown";
}

ReportKind parse_report_kind(const std::string& t) {
  for (auto k : {ReportKind::Normality, ReportKind::VarianceRatio, ReportKind::EstimatorRatio,
                 ReportKind::BiasVsStd, ReportKind::CovarianceHeatmap})
    if (t == to_string(k)) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown report kind: " + t);
}

ReportKind default_report_kind(const std::string& name) {
  if (name == "variance-ratio") return ReportKind::VarianceRatio;
  if (name == "estimator-ratio") return ReportKind::EstimatorRatio;
  if (name == "bias-vs-std") return ReportKind::BiasVsStd;
  if (name == "covariance-heatmap") return ReportKind::CovarianceHeatmap;
  return ReportKind::Normality;
}

namespace {

LimitScaling limit_for(const KernelSpec& kernel, int m) {
  const Kernel k = kernel.make(m);
  return kernel.scaling == KernelScaling::Normalized ? LimitScaling::normalized()
                                                     : LimitScaling::raw(k.sigma_eta());
}

std::optional<AnalyticSpectrum> spectrum_for(const ManifoldSpec& spec, const KernelSpec& kernel,
                                             int l_max) {
  try {
    const auto model = DensityModel::uniform(spec);
    return analytic_spectrum(model, limit_for(kernel, spec.intrinsic_dim()), l_max);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnsupportedManifold) return std::nullopt;
    throw;
  }
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
  return out;
}

double num(double v) { return v; }

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Group {
  const CaseSpec* spec;
  std::size_t n;
  std::vector<const ExperimentRecord*> recs;
};

std::vector<Group> group_records(const ExperimentConfig& config,
                                 const std::vector<ExperimentRecord>& records) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const ExperimentRecord*>> by;
  for (const auto& r : records)
    if (r.ok) by[{r.case_label, r.n}].push_back(&r);
  std::vector<Group> out;
  for (const auto& c : config.cases)
    for (std::size_t n : config.sample_sizes) {
      auto it = by.find({c.label, n});
      if (it != by.end()) out.push_back({&c, n, it->second});
    }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::nan("");
  return std::sqrt(summarize(v).variance);
}

class Writer {
 public:
  Writer(std::string dir, ReportOutcome& out) : dir_(std::move(dir)), out_(out) {}

  std::ofstream open(const std::string& name) {
    const std::string path = (fs::path(dir_) / name).string();
    std::ofstream f(path);
    require(static_cast<bool>(f), ErrorCode::Io, "cannot write " + path);
    out_.files.push_back(path);
    f << std::setprecision(17);
    return f;
  }

  void check(std::string name, double value, std::string threshold, bool pass) {
    out_.checks.push_back({std::move(name), value, std::move(threshold), pass});
    out_.pass = out_.pass && pass;
  }

 private:
  std::string dir_;
  ReportOutcome& out_;
};

void neighbor_checks(const std::vector<Group>& groups, Writer& w) {
  for (const auto& g : groups) {
    double worst = 1.0;
    for (const auto* r : g.recs) {
      const double q = r->neighbor_ratio;
      if (std::abs(std::log(q)) > std::abs(std::log(worst))) worst = q;
    }
    w.check(g.spec->label + "/n=" + std::to_string(g.n) + "/neighbor_ratio", worst, "[1/3, 3]",
            worst >= 1.0 / 3.0 && worst <= 3.0);
  }
}

std::vector<double> lambdas(const Group& g, int l) {
  std::vector<double> v;
  for (const auto* r : g.recs) v.push_back(r->eigenvalue(l));
  return v;
}

json normality(const ExperimentConfig& config, const std::vector<Group>& groups, Writer& w) {
  json rows = json::array();
  auto table = w.open("normality.csv");
  table << "case,n,index,reps,center,center_value,sw_w,sw_p,qq_max_dev\n";
  for (const auto& g : groups)
    for (int l : config.indices) {
      const auto lam = lambdas(g, l);
      double center = mean_of(lam);
      if (config.center == CenterMode::AnalyticLambda) {
        const auto t = theory_lambda(g.spec->manifold, config.kernel, l);
        center = t ? *t : std::nan("");
      }
      const double rn = std::sqrt(static_cast<double>(g.n));
      std::vector<double> z, centred;
      for (std::size_t k = 0; k < lam.size(); ++k) {
        const double s2 = g.recs[k]->sigma_hat(l);
        z.push_back(s2 > 0 ? rn * (lam[k] - center) / std::sqrt(s2) : std::nan(""));
        centred.push_back(rn * (lam[k] - center));
      }
      const std::string tag = slug(g.spec->label) + "_n" + std::to_string(g.n) + "_l" + std::to_string(l);
      ShapiroWilk sw{std::nan(""), std::nan("")};
      double qq = std::nan("");
      const bool finite = std::all_of(z.begin(), z.end(), [](double x) { return std::isfinite(x); });
      if (finite && z.size() >= 3 && z.size() <= 5000) {
        try {
          sw = shapiro_wilk(z);
          qq = qq_max_deviation(z);
          auto kf = w.open("kde_" + tag + ".csv");
          write_kde_csv(kde(z), kf);
          auto kc = w.open("kde_centred_" + tag + ".csv");
          write_kde_csv(kde(centred), kc);
          auto qf = w.open("qq_" + tag + ".csv");
          write_qq_csv(qq_points(z), qf);
        } catch (const Error&) {
          // zero spread: leave NaN and fail the check below
        }
      }
      table << g.spec->label << "," << g.n << "," << l << "," << lam.size() << ","
            << to_string(config.center) << "," << fmt(center) << "," << fmt(sw.w) << ","
            << fmt(sw.p_value) << "," << fmt(qq) << "\n";
      w.check(tag + "/shapiro_wilk_p", sw.p_value, "> 0.01", sw.p_value > 0.01);
      w.check(tag + "/qq_max_dev", qq, "< 0.15", qq < 0.15);
      rows.push_back({{"case", g.spec->label}, {"n", g.n}, {"index", l}, {"reps", lam.size()},
                      {"sw_w", num(sw.w)}, {"sw_p", num(sw.p_value)}, {"qq_max_dev", num(qq)}});
    }
  return rows;
}

json variance_ratio(const ExperimentConfig& config, const std::vector<Group>& groups, Writer& w) {
  json rows = json::array();
  auto table = w.open("variance_ratio.csv");
  table << "case,n,index,reps,eps,mean_lambda,var_lambda,sigma_sq,ratio\n";
  for (const auto& g : groups)
    for (int l : config.indices) {
      const auto lam = lambdas(g, l);
      const double var = lam.size() >= 2 ? summarize(lam).variance : std::nan("");
      const auto s2 = theory_sigma_sq(g.spec->manifold, config.kernel, l);
      const double ratio = s2 ? static_cast<double>(g.n) * var / *s2 : std::nan("");
      table << g.spec->label << "," << g.n << "," << l << "," << lam.size() << ","
            << fmt(g.spec->eps(g.n)) << "," << fmt(mean_of(lam)) << "," << fmt(var) << ","
            << fmt(s2.value_or(std::nan(""))) << "," << fmt(ratio) << "\n";
      w.check(g.spec->label + "/n=" + std::to_string(g.n) + "/l=" + std::to_string(l) + "/ratio",
              ratio, "[0.8, 1.2]", ratio >= 0.8 && ratio <= 1.2);
      rows.push_back({{"case", g.spec->label}, {"n", g.n}, {"index", l}, {"ratio", num(ratio)}});
    }
  return rows;
}

json estimator_ratio(const ExperimentConfig& config, const std::vector<Group>& groups, Writer& w) {
  json rows = json::array();
  auto table = w.open("estimator_ratio.csv");
  table << "case,n,index,reps,sigma_sq,median_ratio,mad_ratio,q25_ratio,q75_ratio\n";
  for (const auto& g : groups)
    for (int l : config.indices) {
      const auto s2 = theory_sigma_sq(g.spec->manifold, config.kernel, l);
      std::vector<double> ratio;
      for (const auto* r : g.recs) ratio.push_back(s2 ? r->sigma_hat(l) / *s2 : std::nan(""));
      const auto s = summarize(ratio);
      table << g.spec->label << "," << g.n << "," << l << "," << ratio.size() << ","
            << fmt(s2.value_or(std::nan(""))) << "," << fmt(s.median) << "," << fmt(s.mad) << ","
            << fmt(quantile(ratio, 0.25)) << "," << fmt(quantile(ratio, 0.75)) << "\n";
      w.check(g.spec->label + "/n=" + std::to_string(g.n) + "/l=" + std::to_string(l) +
                  "/median_ratio",
              s.median, "[0.8, 1.2]", s.median >= 0.8 && s.median <= 1.2);
      rows.push_back({{"case", g.spec->label}, {"n", g.n}, {"index", l},
                      {"median_ratio", num(s.median)}, {"mad_ratio", num(s.mad)}});
    }
  return rows;
}

json bias_vs_std(const ExperimentConfig& config, const std::vector<Group>& groups, Writer& w) {
  json rows = json::array();
  auto table = w.open("bias_std.csv");
  table << "case,n,index,reps,eps,lambda,mean_lambda,bias,std_sqrt_n_lambda,bias_over_std\n";
  struct Series {
    std::vector<double> bias, sd;
    const CaseSpec* spec;
  };
  std::map<std::pair<std::string, int>, Series> series;
  for (const auto& g : groups)
    for (int l : config.indices) {
      const auto lam = lambdas(g, l);
      const auto t = theory_lambda(g.spec->manifold, config.kernel, l);
      const double lambda = t.value_or(std::nan(""));
      const double mean = mean_of(lam);
      const double bias = lam.size() >= 30 ? bias_magnitude(mean, lambda, g.n, lam.size())
                                           : std::sqrt(static_cast<double>(g.n)) * std::abs(mean - lambda);
      const double sd = std::sqrt(static_cast<double>(g.n)) * sd_of(lam);
      table << g.spec->label << "," << g.n << "," << l << "," << lam.size() << ","
            << fmt(g.spec->eps(g.n)) << "," << fmt(lambda) << "," << fmt(mean) << "," << fmt(bias)
            << "," << fmt(sd) << "," << fmt(bias / sd) << "\n";
      auto& s = series[{g.spec->label, l}];
      s.spec = g.spec;
      s.bias.push_back(bias);
      s.sd.push_back(sd);
      rows.push_back({{"case", g.spec->label}, {"n", g.n}, {"index", l}, {"bias", num(bias)},
                      {"std", num(sd)}});
    }
  for (const auto& [key, s] : series) {
    bool dec = s.bias.size() >= 2, inc = s.bias.size() >= 2;
    for (std::size_t k = 1; k < s.bias.size(); ++k) {
      dec = dec && s.bias[k] < s.bias[k - 1];
      inc = inc && s.bias[k] > s.bias[k - 1];
    }
    const auto [lo, hi] = std::minmax_element(s.sd.begin(), s.sd.end());
    const double spread = *hi / *lo - 1.0;
    const std::string name = key.first + "/l=" + std::to_string(key.second);
    w.check(name + "/std_variation", spread, "< 0.5", spread < 0.5);
    // The bias trend has a stated expectation only for m = 1 and m = 2.
    const int m = s.spec->manifold.intrinsic_dim();
    if (m == 1) w.check(name + "/bias_strictly_decreasing", dec, "true", dec);
    if (m == 2) w.check(name + "/bias_strictly_increasing", inc, "true", inc);
  }
  return rows;
}

json empirical_heatmap(const ExperimentConfig& config, const std::vector<Group>& groups, Writer& w) {
  json rows = json::array();
  const int L = config.eigen_count();
  std::vector<std::string> labels;
  for (int l = 1; l <= L; ++l) labels.push_back("lambda_" + std::to_string(l));
  for (const auto& g : groups) {
    if (g.recs.size() < 2) continue;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(g.recs.size()), L);
    for (std::size_t r = 0; r < g.recs.size(); ++r)
      for (int l = 1; l <= L; ++l) X(static_cast<Eigen::Index>(r), l - 1) = g.recs[r]->eigenvalue(l);
    const auto cc = empirical_cov_corr(X);
    const std::string tag = slug(g.spec->label) + "_n" + std::to_string(g.n);
    auto fc = w.open("empirical_covariance_" + tag + ".csv");
    write_matrix_csv(cc.covariance, labels, fc);
    auto fr = w.open("empirical_correlation_" + tag + ".csv");
    write_matrix_csv(cc.correlation, labels, fr);
    rows.push_back({{"case", g.spec->label}, {"n", g.n}, {"reps", g.recs.size()}});
  }
  return rows;
}

json theory_heatmap(const ExperimentConfig& config, Writer& w) {
  json rows = json::array();
  for (const auto& c : config.cases) {
    const int l_max = c.theory_l_max > 0 ? c.theory_l_max : config.theory_l_max;
    const auto spectrum = spectrum_for(c.manifold, config.kernel, l_max);
    if (!spectrum) continue;
    std::vector<int> idx;
    for (int l = 2; l <= l_max; ++l) idx.push_back(l);
    const auto grid = QuadratureGrid::build(c.manifold);
    const auto rep = compute_theory_report(*spectrum, idx, grid, 0);
    const std::string tag = slug(c.label);
    auto fc = w.open("heatmap_" + tag + "_covariance.csv");
    write_matrix_csv(rep.covariance, rep.labels, fc);
    auto fr = w.open("heatmap_" + tag + "_correlation.csv");
    write_matrix_csv(rep.correlation, rep.labels, fr);
    auto fj = w.open("theory_" + tag + ".json");
    write_theory_json(rep, fj);

    // Sign of correlations inside each eigenspace: nonpositive on the circle,
    // nonnegative on the flat torus.
    const bool circle = c.manifold.get_if<Circle>() ||
                        (c.manifold.get_if<Sphere>() && c.manifold.get_if<Sphere>()->dim == 1);
    const bool torus = c.manifold.get_if<FlatTorus>() != nullptr;
    double extreme = circle ? -1.0 : 1.0;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (spectrum->at(idx[a]).cluster != spectrum->at(idx[b]).cluster) continue;
        const double r = rep.correlation(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        extreme = circle ? std::max(extreme, r) : std::min(extreme, r);
      }
    if (circle) w.check(c.label + "/max_within_eigenspace_correlation", extreme, "<= 1e-8", extreme <= 1e-8);
    if (torus) w.check(c.label + "/min_within_eigenspace_correlation", extreme, ">= -1e-8", extreme >= -1e-8);
    rows.push_back({{"case", c.label}, {"l_max", l_max}, {"grid", grid.resolution}});
  }
  return rows;
}

}  // namespace

std::optional<double> theory_lambda(const ManifoldSpec& spec, const KernelSpec& kernel, int l) {
  const auto s = spectrum_for(spec, kernel, l);
  if (!s) return std::nullopt;
  return s->at(l).eigenvalue;
}

std::optional<double> theory_sigma_sq(const ManifoldSpec& spec, const KernelSpec& kernel, int l) {
  const auto s = spectrum_for(spec, kernel, l);
  if (!s) return std::nullopt;
  return sigma_sq_quadrature(s->model, s->at(l), QuadratureGrid::build(spec));
}

ReportOutcome report(const ExperimentConfig& config, const std::vector<ExperimentRecord>& records,
                     ReportKind kind, const std::string& out_dir) {
  fs::create_directories(out_dir);
  ReportOutcome out;
  Writer w(out_dir, out);
  const auto groups = group_records(config, records);
  const bool theory = kind == ReportKind::CovarianceHeatmap && config.theory_only;
  require(theory || !groups.empty(), ErrorCode::InvalidArgument, "report needs at least one usable record");

  json rows;
  switch (kind) {
    case ReportKind::Normality: rows = normality(config, groups, w); break;
    case ReportKind::VarianceRatio: rows = variance_ratio(config, groups, w); break;
    case ReportKind::EstimatorRatio: rows = estimator_ratio(config, groups, w); break;
    case ReportKind::BiasVsStd: rows = bias_vs_std(config, groups, w); break;
    case ReportKind::CovarianceHeatmap:
      rows = theory ? theory_heatmap(config, w) : empirical_heatmap(config, groups, w);
      break;
  }
  if (!theory) neighbor_checks(groups, w);

  json checks = json::array();
  for (const auto& c : out.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.ok ? 0 : 1;
  json summary = {{"schema_version", 1},
                  {"kind", to_string(kind)},
                  {"config", config.name},
                  {"records", records.size()},
                  {"failed_records", failed},
                  {"rows", rows},
                  {"checks", checks},
                  {"pass", out.pass}};
  auto f = w.open("summary.json");
  f << std::setw(2) << summary << "\n";
  return out;
}

}  // namespace glclt
