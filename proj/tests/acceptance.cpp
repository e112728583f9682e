// Acceptance checks 1-12. Each prints one "criterion k: PASS|FAIL ..." line.
// Usage: glclt_acceptance [--criterion k]...

#include "glclt/config.hpp"
#include "glclt/csv.hpp"
#include "glclt/estimators.hpp"
#include "glclt/graph.hpp"
#include "glclt/harness.hpp"
#include "glclt/quadrature.hpp"
#include "glclt/report.hpp"
#include "glclt/rng.hpp"
#include "glclt/spectra.hpp"
#include "glclt/stats.hpp"
#include "glclt/theory.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace glclt;
namespace {

constexpr double kPi = std::numbers::pi;
const double kCirclePaperSigma = 81.0 / (8 * kPi * kPi);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%.6g", v[i]);
  return s + "]";
}

AnalyticSpectrum raw_spectrum(const ManifoldSpec& s, int l_max) {
  return analytic_spectrum(DensityModel::uniform(s), LimitScaling::raw(indicator_sigma_eta(s.intrinsic_dim())),
                           l_max);
}

ExperimentConfig circle_mc(std::size_t n, std::size_t reps, const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.cases = {{"circle", Circle{1.0}, {1.0, 0.2}}};
  c.sample_sizes = {n};
  c.indices = {2};
  c.repetitions = reps;
  c.master_seed = 20250101;
  return c;
}

std::vector<double> column(const std::vector<ExperimentRecord>& recs, const std::function<double(const ExperimentRecord&)>& f) {
  std::vector<double> out;
  for (const auto& r : recs)
    if (r.ok) out.push_back(f(r));
  return out;
}

// 1. Sparse Laplacian equals the dense double sum.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const int m = 1 + k % 2;
    const std::size_t n = 40 + 8 * static_cast<std::size_t>(k);  // 40..192
    const auto cloud = testing::random_cloud(n, m + 1, m, 1000 + k);
    const double eps = 0.25 + 0.02 * k;
    const Kernel ker = k % 4 < 2 ? Kernel::indicator(m) : Kernel::tabulated({1.0, 0.7, 0.2}, m);
    const auto op = assemble_laplacian(build_eps_graph(cloud, eps, ker), m);
    const Eigen::MatrixXd D = testing::dense_laplacian(cloud, eps, ker, m);
    worst = std::max(worst, (op.dense() - D).cwiseAbs().maxCoeff());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-12 && secs < 10,
          fmt("max entrywise difference %.3e over 20 clouds (tol 1e-12), %.2fs (limit 10s)", worst, secs)};
}

// 2. lambda_1 ~ 0 with a constant eigenvector; Rayleigh quotients nonnegative.
Outcome criterion2() {
  struct G {
    ManifoldSpec s;
    std::size_t n;
    double eps;
  };
  const std::vector<G> graphs{{Circle{1.0}, 300, 0.3},       {Circle{1.0}, 3000, 0.2},
                              {Sphere{2, 1.0}, 400, 0.4},    {Sphere{2, 1.0}, 4000, 0.25},
                              {EmbeddedTorus{2.0, 1.0}, 3000, 0.6}, {Ellipse{1.0, std::numbers::sqrt2}, 2000, 0.25}};
  double worst_l1 = 0, worst_const = 0, min_rq = std::numeric_limits<double>::infinity();
  int tested = 0;
  CounterRng rng(4242);
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const auto& t = graphs[g];
    const auto op = assemble_laplacian(build_eps_graph(sample(t.s, t.n, 70 + g), t.eps,
                                                       Kernel::indicator(t.s.intrinsic_dim())),
                                       t.s.intrinsic_dim());
    int comps = 0;
    op.components(&comps);
    if (comps != 1) continue;
    ++tested;
    const auto p = smallest_eigenpairs(op, 2);
    worst_l1 = std::max(worst_l1, std::abs(p.value(1)));
    worst_const = std::max(worst_const, (p.vector(1).array() - 1.0).abs().maxCoeff());
    for (int r = 0; r < 200 / static_cast<int>(graphs.size()) + 1; ++r) {
      Eigen::VectorXd f(static_cast<Eigen::Index>(t.n));
      for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = rng.normal();
      min_rq = std::min(min_rq, f.dot(op.apply(f)) / f.dot(f));
    }
  }
  const bool pass = tested == static_cast<int>(graphs.size()) && worst_l1 <= 1e-10 && worst_const < 1e-8 &&
                    min_rq >= -1e-12;
  return {pass, fmt("%d connected graphs: max|lambda_1| %.2e, max|v_1 - 1| %.2e, min Rayleigh quotient %.3e",
                    tested, worst_l1, worst_const, min_rq)};
}

// 3. n Var(lambda_2) against 81/(8 pi^2).
Outcome criterion3() {
  const std::size_t n = 5000;
  const auto res = run_mc(circle_mc(n, 500, "criterion3"));
  const auto lam = column(res.records, [](const auto& r) { return r.eigenvalue(2); });
  const double ratio = static_cast<double>(n) * summarize(lam).variance / kCirclePaperSigma;
  return {res.acceptable() && ratio >= 0.8 && ratio <= 1.2,
          fmt("n Var(lambda_2) / (81/(8 pi^2)) = %.4f (target [0.8, 1.2]); reps %zu, failed %zu", ratio,
              lam.size(), res.failed)};
}

// 4. Median sigma_hat^2 / sigma^2 on the circle.
Outcome criterion4() {
  const auto cfg = circle_mc(2000, 50, "criterion4");
  const auto res = run_mc(cfg);
  const double s2 = theory_sigma_sq(Circle{1.0}, cfg.kernel, 2).value();
  const auto ratios = column(res.records, [&](const auto& r) { return r.sigma_hat(2) / s2; });
  const auto s = summarize(ratios);
  return {res.acceptable() && s.median >= 0.8 && s.median <= 1.2,
          fmt("median sigma_hat^2/sigma^2 = %.4f (MAD %.4f, sigma^2 = %.6g, target [0.8, 1.2])", s.median, s.mad,
              s2)};
}

// 5. Studentized lambda_2 centred at the MC mean looks normal.
Outcome criterion5() {
  const std::size_t n = 4000;
  const auto res = run_mc(circle_mc(n, 500, "criterion5"));
  const auto lam = column(res.records, [](const auto& r) { return r.eigenvalue(2); });
  const double mean = summarize(lam).mean;
  std::vector<double> z;
  for (const auto& r : res.records)
    if (r.ok) z.push_back(studentize(r.eigenvalue(2), mean, std::sqrt(r.sigma_hat_sq.at(0)), n));
  const auto sw = shapiro_wilk(z);
  const double qq = qq_max_deviation(z);
  return {sw.p_value > 0.01 && qq < 0.15,
          fmt("Shapiro-Wilk W = %.4f p = %.3g (need > 0.01), QQ max deviation %.3f (need < 0.15)", sw.w, sw.p_value,
              qq)};
}

// 6. Quadrature against the published values.
Outcome criterion6() {
  const auto c = raw_spectrum(Circle{1.0}, 3);
  const double circle = sigma_sq_quadrature(c.model, c.at(2), QuadratureGrid::build(Circle{1.0}));
  const bool circle_ok = std::abs(circle - kCirclePaperSigma) <= 1e-6;

  const ManifoldSpec s = Sphere{2, 1.0};
  const auto model = DensityModel::uniform(s);
  const auto sp = analytic_spectrum(model, LimitScaling::laplace_beltrami(model), 9);
  const auto g = QuadratureGrid::build(s);
  std::vector<double> d1, d2;
  for (int l : sp.cluster_indices(1)) d1.push_back(sigma_sq_quadrature(model, sp.at(l), g));
  for (int l : sp.cluster_indices(2)) d2.push_back(sigma_sq_quadrature(model, sp.at(l), g));
  const auto [lo, hi] = std::minmax_element(d1.begin(), d1.end());
  const double spread = (*hi - *lo) / *lo;
  const double mean1 = summarize(d1).mean;
  double worst_ratio = 0;
  std::vector<double> ratios;
  for (double v : d2) {
    ratios.push_back(v / mean1);
    worst_ratio = std::max(worst_ratio, std::abs(v / mean1 - 11.25) / 11.25);
  }
  const bool sphere_ok = spread <= 1e-3 && worst_ratio <= 1e-2;
  return {circle_ok && sphere_ok,
          fmt("circle sigma_2^2 = %.9f vs 81/(8 pi^2) = %.9f (%s); sphere degree-1 spread %.2e, degree-2/degree-1 "
              "ratios %s (%s)",
              circle, kCirclePaperSigma, circle_ok ? "ok" : "off", spread, join(ratios).c_str(),
              sphere_ok ? "ok" : "off")};
}

// 7. Fisher-Rao identities.
Outcome criterion7() {
  struct Item {
    ManifoldSpec s;
    std::vector<int> indices;
  };
  const std::vector<Item> items{{Circle{1.0}, {2, 3}}, {Sphere{2, 1.0}, {2, 3, 4}}};
  double worst_mean = 0, worst_norm = 0, worst_pert = 0;
  for (const auto& it : items) {
    const auto sp = raw_spectrum(it.s, 4);
    const auto g = QuadratureGrid::build(it.s);
    for (int l : it.indices) {
      const auto& pair = sp.at(l);
      const auto fr = [&](std::span<const double> x) { return fisher_rao_gradient(sp.model, pair, x); };
      const auto rho = [&](std::span<const double> x) { return density_at(sp.model, x); };
      const double mean = integrate(g, [&](auto x) { return fr(x) * rho(x); });
      const double norm = integrate(g, [&](auto x) { return fr(x) * fr(x) * rho(x); });
      const double s2 = sigma_sq_quadrature(sp.model, pair, g);
      const double pert = perturbation_derivative(sp.model, pair, [&](auto x) { return -fr(x); }, g);
      worst_mean = std::max(worst_mean, std::abs(mean));
      worst_norm = std::max(worst_norm, std::abs(norm - s2));
      worst_pert = std::max(worst_pert, std::abs(pert + s2));
    }
  }
  return {worst_mean <= 1e-8 && worst_norm <= 1e-6 && worst_pert <= 1e-6,
          fmt("max |int grad_FR rho| %.2e, max |int grad_FR^2 rho - sigma^2| %.2e, max |dlambda + sigma^2| %.2e",
              worst_mean, worst_norm, worst_pert)};
}

// 8. Bias against dimension.
Outcome criterion8() {
  ExperimentConfig c;
  c.name = "criterion8";
  c.cases = {{"m1", Circle{1.0}, {4.0, 1 / 3.5}}, {"m2", Sphere{2, 1.0}, {4.0, 1 / 3.5}}};
  c.sample_sizes = {1024, 2048, 4096};
  c.indices = {2};
  c.repetitions = 100;
  const auto res = run_mc(c);
  std::string detail;
  bool pass = res.acceptable();
  for (const auto& cs : c.cases) {
    const double lam = theory_lambda(cs.manifold, c.kernel, 2).value();
    std::vector<double> bias, sd;
    for (std::size_t n : c.sample_sizes) {
      std::vector<double> v;
      for (const auto& r : res.records)
        if (r.ok && r.case_label == cs.label && r.n == n) v.push_back(r.eigenvalue(2));
      const auto s = summarize(v);
      bias.push_back(bias_magnitude(s.mean, lam, n, v.size()));
      sd.push_back(std::sqrt(static_cast<double>(n) * s.variance));
    }
    const bool dec = bias[1] < bias[0] && bias[2] < bias[1];
    const bool inc = bias[1] > bias[0] && bias[2] > bias[1];
    const bool trend = cs.label == "m1" ? dec : inc;
    const auto [lo, hi] = std::minmax_element(sd.begin(), sd.end());
    const double variation = (*hi - *lo) / *lo;
    pass = pass && trend && variation < 0.5;
    detail += fmt("%s: sqrt(n)|bias| %s (%s expected, %s), std %s (variation %.2f); ", cs.label.c_str(),
                  join(bias).c_str(), cs.label == "m1" ? "decreasing" : "increasing", trend ? "ok" : "not met",
                  join(sd).c_str(), variation);
  }
  return {pass, detail};
}

// 9. Pointwise consistency residual trend.
Outcome criterion9() {
  const auto sp = raw_spectrum(Circle{1.0}, 2);
  std::vector<double> eps, res;
  for (std::size_t n : {1000u, 4000u, 16000u}) {
    const double e = std::pow(static_cast<double>(n), -0.2);
    // Mean over independent clouds: the max over one cloud carries sampling noise of the same order.
    double total = 0;
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto cloud = sample(Circle{1.0}, n, 900 + 37 * k + n);
      const auto op = assemble_laplacian(build_eps_graph(cloud, e, Kernel::indicator(1)), 1);
      total += pointwise_consistency_residual(op, cloud, sp, 2);
    }
    eps.push_back(e);
    res.push_back(total / 10);
  }
  const bool dec = res[1] < res[0] && res[2] < res[1];
  const double slope = testing::loglog_slope(eps, res);
  return {dec && slope >= 0.5 && slope <= 2.0,
          fmt("mean max-residuals (10 clouds each) %s at eps %s; log-log slope %.3f (target [0.5, 2])", join(res).c_str(), join(eps).c_str(),
              slope)};
}

// 10. Leave-one-out stability.
Outcome criterion10() {
  std::vector<double> x, med_vec, med_val;
  for (std::size_t n : {500u, 1000u, 2000u}) {
    const double e = std::pow(static_cast<double>(n), -0.2);
    const auto cloud = sample(Circle{1.0}, n, 3100 + n);
    const auto op = assemble_laplacian(build_eps_graph(cloud, e, Kernel::indicator(1)), 1);
    const auto full = smallest_eigenpairs(op, 3);
    std::vector<double> dv, dl;
    for (std::size_t k = 0; k < 20; ++k) {
      const std::size_t i = (k * n) / 20 + 7;
      const auto loo = leave_one_out(op, i);
      const auto p = smallest_eigenpairs(loo, 3);
      // Restrict u_hat to X_{n-1} and renormalize there.
      Eigen::VectorXd v(static_cast<Eigen::Index>(n - 1));
      for (std::size_t j = 0; j < n - 1; ++j) v[static_cast<Eigen::Index>(j)] = full.vectors(loo.point_index()[j], 1);
      v *= std::sqrt(static_cast<double>(n - 1)) / v.norm();
      Eigen::VectorXd f = p.vector(2);
      if (f.dot(v) < 0) f = -f;
      dv.push_back((f - v).norm() / std::sqrt(static_cast<double>(n - 1)));
      dl.push_back(static_cast<double>(n - 1) * std::abs(p.value(2) - full.value(2)));
    }
    x.push_back(1.0 / (static_cast<double>(n) * std::pow(e, 1.5)));
    med_vec.push_back(summarize(dv).median);
    med_val.push_back(summarize(dl).median);
  }
  const double slope = testing::loglog_slope(x, med_vec);
  const auto [lo, hi] = std::minmax_element(med_val.begin(), med_val.end());
  const double spread = *hi / *lo;
  return {slope >= 0.7 && slope <= 1.3 && spread < 5,
          fmt("median ||f_2 - v_2|| %s, slope vs 1/(n eps^1.5) %.3f (target [0.7, 1.3]); median (n-1)|dlambda| %s, "
              "max/min %.2f (need < 5)",
              join(med_vec).c_str(), slope, join(med_val).c_str(), spread)};
}

// 11. Covariance structure and rotation invariance.
Outcome criterion11() {
  auto within = [](const ManifoldSpec& s, int l_max, bool want_nonpositive) {
    const auto sp = raw_spectrum(s, l_max);
    const auto g = QuadratureGrid::build(s);
    std::vector<int> idx;
    for (int l = 2; l <= l_max; ++l) idx.push_back(l);
    const Eigen::MatrixXd C = covariance_matrix(sp, idx, g);
    double extreme = want_nonpositive ? -1e300 : 1e300;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (sp.at(idx[a]).cluster != sp.at(idx[b]).cluster) continue;
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        const double r = C(ia, ib) / std::sqrt(C(ia, ia) * C(ib, ib));
        extreme = want_nonpositive ? std::max(extreme, r) : std::min(extreme, r);
      }
    return extreme;
  };
  const double circle_max = within(Circle{1.0}, 9, true);
  const double torus_min = within(FlatTorus{{2 * kPi, 2 * kPi}}, 9, false);

  double worst_rel = 0;
  struct Space {
    ManifoldSpec s;
    int cluster;
  };
  const std::vector<Space> spaces{{Circle{1.0}, 1}, {Circle{1.0}, 2}, {Circle{1.0}, 3},
                                  {Circle{1.0}, 4}, {Sphere{2, 1.0}, 1}, {Sphere{2, 1.0}, 2}};
  for (const auto& sp_case : spaces) {
    const auto sp = raw_spectrum(sp_case.s, 9);
    const auto g = QuadratureGrid::build(sp_case.s);
    std::vector<AnalyticEigenpair> basis;
    for (int l : sp.cluster_indices(sp_case.cluster)) basis.push_back(sp.at(l));
    auto total = [&](const std::vector<AnalyticEigenpair>& b) {
      double t = 0;
      for (const auto& p : b) t += sigma_sq_quadrature(sp.model, p, g);
      return t;
    };
    const double base = total(basis);
    for (int r = 0; r < 20; ++r) {
      const auto Q = testing::random_orthogonal(static_cast<int>(basis.size()), 500 + 31 * r + sp_case.cluster);
      worst_rel = std::max(worst_rel, std::abs(total(rotate_eigenspace(basis, Q)) - base) / base);
    }
  }
  const bool pass = circle_max <= 1e-8 && torus_min >= -1e-8 && worst_rel <= 1e-6;
  return {pass, fmt("circle within-eigenspace max correlation %.3g (need <= 1e-8); flat torus min %.3g (need >= "
                    "-1e-8); max relative sigma^2-sum change over 20 rotations %.2e (need <= 1e-6)",
                    circle_max, torus_min, worst_rel)};
}

// 12. Record CSVs are bitwise identical across runs and thread counts.
Outcome criterion12() {
  std::vector<std::string> bad;
  int compared = 0;
  for (const auto& name : preset_names()) {
    auto c = preset(name);
    if (c.theory_only) continue;
    c.repetitions = 3;
    std::vector<std::size_t> sizes;
    for (std::size_t k = 0; k < std::min<std::size_t>(2, c.sample_sizes.size()); ++k)
      sizes.push_back(std::min<std::size_t>(c.sample_sizes[k], 1200));
    c.sample_sizes = sizes;
    std::string first;
    for (int threads : {1, 3, 1}) {
      c.threads = threads;
      std::stringstream out;
      run_mc(c, {&out, nullptr, {}});
      if (first.empty()) first = out.str();
      else if (out.str() != first) bad.push_back(name + fmt("@%d", threads));
    }
    ++compared;
  }
  std::string detail = fmt("%d presets (reduced to 3 reps, n <= 1200) run with 1, 3, 1 threads", compared);
  if (!bad.empty()) {
    detail += "; differences in:";
    for (const auto& b : bad) detail += " " + b;
  }
  return {bad.empty() && compared > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> all{criterion1, criterion2, criterion3, criterion4,
                                                  criterion5, criterion6, criterion7, criterion8,
                                                  criterion9, criterion10, criterion11, criterion12};
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--criterion" && a + 1 < argc) {
      selected.insert(std::stoi(argv[++a]));
    } else {
      std::cerr << "usage: glclt_acceptance [--criterion k]...\n";
      return 2;
    }
  }
  if (selected.empty())
    for (int k = 1; k <= 12; ++k) selected.insert(k);

  bool ok = true;
  for (int k : selected) {
    if (k < 1 || k > 12) {
      std::cerr << "no criterion " << k << "\n";
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " (" << fmt("%.1fs", secs) << ") "
              << o.detail << std::endl;
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
