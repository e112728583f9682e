#pragma once

#include "glclt/config.hpp"
#include "glclt/harness.hpp"

#include <optional>
#include <string>
#include <vector>

namespace glclt {

enum class ReportKind { Normality, VarianceRatio, EstimatorRatio, BiasVsStd, CovarianceHeatmap };

const char* to_string(ReportKind k);
ReportKind parse_report_kind(const std::string& text);
/// The report a preset is meant to produce (normality for unknown names).
ReportKind default_report_kind(const std::string& preset_name);

/// Continuum eigenvalue lambda_l and variance sigma_l^2 for the limit the
/// configured kernel converges to; nullopt when no analytic spectrum exists.
std::optional<double> theory_lambda(const ManifoldSpec& spec, const KernelSpec& kernel, int l);
std::optional<double> theory_sigma_sq(const ManifoldSpec& spec, const KernelSpec& kernel, int l);

struct ReportCheck {
  std::string name;
  double value = 0.0;
  std::string threshold;
  bool pass = false;
};

struct ReportOutcome {
  std::vector<std::string> files;  // written paths
  std::vector<ReportCheck> checks;
  bool pass = true;                 // all checks passed
};

/// Writes per-figure CSV files and `summary.json` (schema_version 1) into
/// out_dir. Failed repetitions are skipped. Throws InvalidArgument when no
/// usable record exists (except for theory-only heatmaps).
ReportOutcome report(const ExperimentConfig& config, const std::vector<ExperimentRecord>& records,
                     ReportKind kind, const std::string& out_dir);

}  // namespace glclt
