// Command-line front end: sample, graph, spectrum, estimate, theory, run, report.

#include "glclt/config.hpp"
#include "glclt/csv.hpp"
#include "glclt/error.hpp"
#include "glclt/estimators.hpp"
#include "glclt/graph.hpp"
#include "glclt/harness.hpp"
#include "glclt/quadrature.hpp"
#include "glclt/report.hpp"
#include "glclt/spectra.hpp"
#include "glclt/theory.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace glclt;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorCode::Io, "cannot write " + path);
  f << std::setprecision(17);
  return f;
}

// Writes to `path`, or stdout when path is empty or "-".
template <class F>
void emit(const std::string& path, F&& body) {
  if (path.empty() || path == "-") {
    std::cout << std::setprecision(17);
    body(std::cout);
  } else {
    auto f = open_out(path);
    body(f);
  }
}

std::vector<double> read_table(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path);
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  return v;
}

struct GraphArgs {
  std::string points;
  int dim = 1;
  double eps = 0.1;
  std::string scaling = "raw";
  std::string table;

  void add(CLI::App* app) {
    app->add_option("--points", points, "point cloud CSV (header x0,...)")->required();
    app->add_option("--dim", dim, "intrinsic dimension m")->required();
    app->add_option("--eps", eps, "connectivity radius")->required();
    app->add_option("--kernel-scaling", scaling, "raw | normalized")->capture_default_str();
    app->add_option("--kernel-table", table, "file with a tabulated non-increasing profile on [0,1]");
  }

  LaplacianOperator build(EpsGraph* graph_out = nullptr) const {
    std::ifstream in(points);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + points);
    const PointCloud cloud = read_point_cloud_csv(in, dim);
    KernelSpec ks;
    ks.scaling = parse_kernel_scaling(scaling);
    if (!table.empty()) ks.table = read_table(table);
    EpsGraph g = build_eps_graph(cloud, eps, ks.make(dim));
    std::cerr << "graph: n=" << g.n << " edges=" << g.edge_count() << " components=" << g.component_count
              << " mean_neighbors=" << g.mean_neighbors() << "\n";
    LaplacianOperator op = assemble_laplacian(g, dim);
    if (graph_out) *graph_out = std::move(g);
    return op;
  }
};

void print_summary(const ReportOutcome& out) {
  for (const auto& c : out.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (" << c.threshold << ")\n";
  std::cout << "report: " << (out.pass ? "pass" : "fail") << ", " << out.files.size() << " files\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph Laplacian eigenvalue CLT toolkit"};
  app.require_subcommand(1);

  // sample
  auto* cmd_sample = app.add_subcommand("sample", "draw a uniform point cloud");
  std::string manifold = "circle";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string output;
  cmd_sample->add_option("--manifold", manifold, "e.g. circle, sphere:dim=2, torus:R=2,r=1")->capture_default_str();
  cmd_sample->add_option("-n", n, "number of points")->capture_default_str();
  cmd_sample->add_option("--seed", seed)->capture_default_str();
  cmd_sample->add_option("-o,--output", output, "CSV path (stdout if omitted)");

  // graph
  auto* cmd_graph = app.add_subcommand("graph", "build the eps-graph and export it");
  GraphArgs gargs;
  gargs.add(cmd_graph);
  std::string adjacency, mtx;
  cmd_graph->add_option("--adjacency", adjacency, "coordinate-list CSV i,j,weight");
  cmd_graph->add_option("--matrix-market", mtx, "Laplacian in Matrix Market format");

  // spectrum
  auto* cmd_spec = app.add_subcommand("spectrum", "smallest eigenpairs of the graph Laplacian");
  GraphArgs sargs;
  sargs.add(cmd_spec);
  int count = 5;
  bool dump_vectors = false;
  double tol = 1e-10;
  cmd_spec->add_option("--count", count)->capture_default_str();
  cmd_spec->add_option("--tol", tol)->capture_default_str();
  cmd_spec->add_flag("--vectors", dump_vectors, "append eigenvector entries v0..");
  cmd_spec->add_option("-o,--output", output);

  // estimate
  auto* cmd_est = app.add_subcommand("estimate", "plug-in asymptotic variance per eigenvalue");
  GraphArgs eargs;
  eargs.add(cmd_est);
  std::vector<int> indices{2};
  bool force = false;
  cmd_est->add_option("--indices", indices, "1-based eigen indices")->capture_default_str();
  cmd_est->add_flag("--force", force, "allow indices of repeated eigenvalues");
  cmd_est->add_option("--tol", tol)->capture_default_str();
  cmd_est->add_option("-o,--output", output);

  // theory
  auto* cmd_theory = app.add_subcommand("theory", "quadrature of the asymptotic covariance");
  std::string limit = "normalized";
  int l_max = 9;
  std::size_t n_bound = 0;
  std::string cov_csv, corr_csv;
  std::vector<int> grid_res;
  std::vector<int> theory_idx;
  cmd_theory->add_option("--manifold", manifold)->capture_default_str();
  cmd_theory->add_option("--limit", limit, "normalized | raw | laplace-beltrami")->capture_default_str();
  cmd_theory->add_option("--l-max", l_max)->capture_default_str();
  cmd_theory->add_option("--indices", theory_idx, "default 2..l-max");
  cmd_theory->add_option("--n", n_bound, "sample size for the Cramer-Rao bound");
  cmd_theory->add_option("--grid", grid_res, "quadrature resolution");
  cmd_theory->add_option("-o,--output", output, "JSON report");
  cmd_theory->add_option("--covariance-csv", cov_csv);
  cmd_theory->add_option("--correlation-csv", corr_csv);

  // run
  auto* cmd_run = app.add_subcommand("run", "Monte-Carlo experiment from a preset or YAML config");
  std::string source;
  std::string out_dir;
  int reps = 0, threads = 0;
  std::vector<std::size_t> sizes;
  std::uint64_t master_seed = 0;
  std::string center, kind;
  bool no_report = false, print_config = false;
  cmd_run->add_option("source", source, "preset name or config file")->required();
  cmd_run->add_option("--out", out_dir, "output directory");
  cmd_run->add_option("--reps", reps, "repetitions per (case, n)");
  cmd_run->add_option("--sizes", sizes, "sample sizes");
  cmd_run->add_option("--seed", master_seed, "master seed");
  cmd_run->add_option("--threads", threads, "worker threads (default: GLCLT_THREADS or all cores)");
  cmd_run->add_option("--center", center, "mc_mean | analytic_lambda");
  cmd_run->add_option("--kind", kind, "report kind (default from preset)");
  cmd_run->add_flag("--no-report", no_report);
  cmd_run->add_flag("--print-config", print_config, "print the resolved config and exit");

  // report
  auto* cmd_report = app.add_subcommand("report", "rebuild report files from a record CSV");
  std::string records_path, config_path;
  cmd_report->add_option("--records", records_path)->required();
  cmd_report->add_option("--config", config_path, "config YAML written by run")->required();
  cmd_report->add_option("--kind", kind);
  cmd_report->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_sample) {
      const PointCloud cloud = sample(parse_manifold(manifold), n, seed);
      emit(output, [&](std::ostream& o) { write_point_cloud_csv(cloud, o); });
    } else if (*cmd_graph) {
      EpsGraph g;
      const LaplacianOperator op = gargs.build(&g);
      if (!adjacency.empty()) emit(adjacency, [&](std::ostream& o) { write_adjacency_csv(g, o); });
      if (!mtx.empty()) emit(mtx, [&](std::ostream& o) { write_matrix_market(op, o); });
    } else if (*cmd_spec) {
      const LaplacianOperator op = sargs.build();
      const EigenPairs pairs = smallest_eigenpairs(op, count, tol);
      emit(output, [&](std::ostream& o) { write_eigenpairs_csv(pairs, o, dump_vectors); });
      const auto gaps = eigengap_report(pairs.values);
      for (int l = 1; l <= pairs.count(); ++l)
        if (!gaps.is_simple(l)) std::cerr << "note: lambda_" << l << " is not simple\n";
    } else if (*cmd_est) {
      const LaplacianOperator op = eargs.build();
      int mx = 1;
      for (int l : indices) mx = std::max(mx, l);
      const EigenPairs pairs = smallest_eigenpairs(op, mx + 1, tol);
      const auto gaps = eigengap_report(pairs.values);
      std::vector<Eigen::VectorXd> surrogates;
      for (int l : indices) surrogates.push_back(gradient_surrogate(op, pairs.vector(l)));
      const auto cov = cov_hat(pairs, indices, surrogates, gaps, force);
      emit(output, [&](std::ostream& o) {
        o << "index,lambda_hat,sigma_hat_sq,eigengap,simple\n";
        for (std::size_t k = 0; k < indices.size(); ++k) {
          const int l = indices[k];
          const auto kk = static_cast<Eigen::Index>(k);
          o << l << "," << pairs.value(l) << "," << cov.matrix(kk, kk) << ","
            << gaps.gaps[static_cast<std::size_t>(l - 1)] << "," << (gaps.is_simple(l) ? 1 : 0) << "\n";
        }
      });
    } else if (*cmd_theory) {
      const ManifoldSpec spec = parse_manifold(manifold);
      const auto model = DensityModel::uniform(spec);
      LimitScaling scaling = LimitScaling::normalized();
      if (limit == "raw") scaling = LimitScaling::raw(indicator_sigma_eta(spec.intrinsic_dim()));
      else if (limit == "laplace-beltrami") scaling = LimitScaling::laplace_beltrami(model);
      else if (limit != "normalized") throw Error(ErrorCode::InvalidArgument, "unknown limit " + limit);
      if (theory_idx.empty())
        for (int l = 2; l <= l_max; ++l) theory_idx.push_back(l);
      for (int l : theory_idx) l_max = std::max(l_max, l);
      const auto spectrum = analytic_spectrum(model, scaling, l_max);
      const auto grid = QuadratureGrid::build(spec, grid_res);
      const auto rep = compute_theory_report(spectrum, theory_idx, grid, n_bound);
      emit(output, [&](std::ostream& o) { write_theory_json(rep, o); });
      if (!cov_csv.empty()) emit(cov_csv, [&](std::ostream& o) { write_matrix_csv(rep.covariance, rep.labels, o); });
      if (!corr_csv.empty()) emit(corr_csv, [&](std::ostream& o) { write_matrix_csv(rep.correlation, rep.labels, o); });
    } else if (*cmd_run) {
      const bool is_preset = !fs::exists(source);
      ExperimentConfig config = is_preset ? preset(source) : load_config(source);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (reps > 0) config.repetitions = static_cast<std::size_t>(reps);
      if (!sizes.empty()) config.sample_sizes = sizes;
      if (master_seed != 0) config.master_seed = master_seed;
      if (threads > 0) config.threads = threads;
      if (center == "mc_mean") config.center = CenterMode::McMean;
      else if (center == "analytic_lambda") config.center = CenterMode::AnalyticLambda;
      else if (!center.empty()) throw Error(ErrorCode::InvalidArgument, "unknown center " + center);
      config.validate();
      if (print_config) {
        std::cout << dump_config(config);
        return 0;
      }
      for (const auto& w : config.warnings()) std::cerr << "warning: " << w << "\n";
      // Connectivity scale (log n / n)^{1/m} next to the configured eps, for orientation.
      for (const auto& cs : config.cases)
        for (std::size_t n : config.sample_sizes) {
          const double nn = static_cast<double>(n);
          std::cerr << cs.label << " n=" << n << ": eps=" << cs.eps(n)
                    << " (log n / n)^(1/m)=" << std::pow(std::log(nn) / nn, 1.0 / cs.manifold.intrinsic_dim())
                    << "\n";
        }
      fs::create_directories(config.output_dir);
      {
        auto f = open_out((fs::path(config.output_dir) / "config.yaml").string());
        f << dump_config(config);
      }
      const ReportKind rk = kind.empty() ? default_report_kind(config.name) : parse_report_kind(kind);
      if (config.theory_only) {
        print_summary(report(config, {}, rk, config.output_dir));
        return 0;
      }
      auto rec = open_out((fs::path(config.output_dir) / "records.csv").string());
      auto tim = open_out((fs::path(config.output_dir) / "timings.csv").string());
      McSinks sinks{&rec, &tim, [](std::size_t done, std::size_t total) {
                      if (done == total || done % 50 == 0) std::cerr << "\r" << done << "/" << total << std::flush;
                    }};
      const McResult res = run_mc(config, sinks);
      std::cerr << "\n" << res.failed << " of " << res.records.size() << " repetitions failed\n";
      if (!no_report) print_summary(report(config, res.records, rk, config.output_dir));
      if (!res.acceptable()) {
        std::cerr << "error: more than 5% of repetitions failed\n";
        return 2;
      }
    } else if (*cmd_report) {
      const ExperimentConfig config = load_config(config_path);
      std::ifstream in(records_path);
      require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + records_path);
      const auto records = read_records(in);
      const ReportKind rk = kind.empty() ? default_report_kind(config.name) : parse_report_kind(kind);
      print_summary(report(config, records, rk, out_dir.empty() ? config.output_dir : out_dir));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
