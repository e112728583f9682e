#pragma once

#include "glclt/kernel.hpp"
#include "glclt/manifolds.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace glclt {

/// eps(n) = constant * n^{-exponent}.
struct EpsRule {
  double constant = 1.0;
  double exponent = 0.2;

  double operator()(std::size_t n) const;
  std::string describe() const;
};

enum class CenterMode { McMean, AnalyticLambda };

const char* to_string(CenterMode c);

struct KernelSpec {
  std::vector<double> table;  // empty: indicator
  KernelScaling scaling = KernelScaling::Raw;

  Kernel make(int intrinsic_dim) const;
};

/// One manifold with its own eps schedule; presets may contain several.
struct CaseSpec {
  std::string label;
  ManifoldSpec manifold = Circle{};
  EpsRule eps;
  /// Eigenfunctions in theory-only heatmaps; 0 uses the config-wide value.
  int theory_l_max = 0;
};

struct ExperimentConfig {
  std::string name = "custom";
  std::vector<CaseSpec> cases;
  std::vector<std::size_t> sample_sizes;
  KernelSpec kernel;
  std::vector<int> indices{2};  // 1-based eigen indices under study
  std::size_t repetitions = 200;
  std::uint64_t master_seed = 20250101;
  CenterMode center = CenterMode::McMean;
  std::string output_dir = "glclt-out";
  int threads = 0;  // 0: GLCLT_THREADS or hardware concurrency
  double solver_tol = 1e-10;
  /// Theory-only presets skip sampling and emit quadrature matrices.
  bool theory_only = false;
  int theory_l_max = 9;

  /// Eigenpairs computed per repetition: max index + 1 so gaps are visible.
  int eigen_count() const;
  /// Throws InvalidArgument on structural errors.
  void validate() const;
  /// Non-fatal issues (e.g. eps > 1 for some configured n).
  std::vector<std::string> warnings() const;
};

std::vector<std::string> preset_names();
/// normality, variance-ratio, estimator-ratio, small-eps, bias-vs-std,
/// covariance-heatmap, and the opt-in long-running sphere8.
ExperimentConfig preset(const std::string& name);

/// YAML (see README for the schema). Keys that are absent keep defaults.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& config);

/// Thread count: explicit value if positive, else GLCLT_THREADS, else hardware.
int resolve_threads(int requested);

}  // namespace glclt
