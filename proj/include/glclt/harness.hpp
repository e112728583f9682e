#pragma once

#include "glclt/config.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace glclt {

struct StageTimings {
  double sample = 0.0;
  double graph = 0.0;
  double solve = 0.0;
  double estimate = 0.0;
  long matvecs = 0;
};

/// One Monte-Carlo repetition.
struct ExperimentRecord {
  std::string case_label;
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  bool connected = false;
  int components = 0;
  double mean_neighbors = 0.0;
  /// mean_neighbors / ((n - 1) vol(B^m) eps^m rho), the small-eps prediction.
  double neighbor_ratio = 0.0;
  std::vector<double> eigenvalues;  // lambda_1..lambda_L ascending
  std::vector<int> indices;         // indices with an estimator value
  std::vector<double> sigma_hat_sq;
  bool ok = true;
  std::string error;
  StageTimings timings;  // persisted separately; not part of the deterministic body

  double eigenvalue(int l) const { return eigenvalues.at(static_cast<std::size_t>(l - 1)); }
  double sigma_hat(int l) const;
};

/// Child seed from (master, case label, n, rep); adding sizes or cases never
/// perturbs existing repetitions.
std::uint64_t repetition_seed(std::uint64_t master, const std::string& case_label, std::size_t n,
                              std::size_t rep);

/// sample -> graph -> eigensolve -> estimate. Library errors are captured in
/// the record (ok = false), never thrown.
ExperimentRecord run_repetition(const ExperimentConfig& config, const CaseSpec& spec, std::size_t n,
                                std::size_t rep);

/// Expected mean neighbour count for a uniform sample at small eps.
double predicted_mean_neighbors(const ManifoldSpec& spec, std::size_t n, double eps);

struct McResult {
  std::vector<ExperimentRecord> records;  // in (case, n, rep) order
  std::size_t failed = 0;

  /// More than 5% failed repetitions fails the run.
  bool acceptable() const { return failed * 20 <= records.size(); }
};

struct McSinks {
  std::ostream* records = nullptr;  // record CSV, written in job order as jobs complete
  std::ostream* timings = nullptr;  // timing CSV
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Runs every (case, n, rep) job on a pool of resolve_threads(config.threads)
/// workers. Output is identical for any thread count.
McResult run_mc(const ExperimentConfig& config, const McSinks& sinks = {});

}  // namespace glclt
