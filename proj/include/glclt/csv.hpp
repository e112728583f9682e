#pragma once

#include "glclt/harness.hpp"

#include <iosfwd>
#include <vector>

namespace glclt {

/// Record CSV:
///   case,n,rep,seed,eps,connected,components,mean_neighbors,neighbor_ratio,ok,error,
///   lambda_1..lambda_L,sigma_hat_sq_<l> for each configured index l.
/// Doubles use 17 significant digits; failed repetitions carry `nan`.
void write_record_header(std::ostream& out, int eigen_count, const std::vector<int>& indices);
void write_record_row(std::ostream& out, const ExperimentRecord& r, int eigen_count,
                      const std::vector<int>& indices);
std::vector<ExperimentRecord> read_records(std::istream& in);

/// Timing CSV: case,n,rep,sample_s,graph_s,solve_s,estimate_s,matvecs.
void write_timing_header(std::ostream& out);
void write_timing_row(std::ostream& out, const ExperimentRecord& r);

}  // namespace glclt
