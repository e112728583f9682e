#include "glclt/csv.hpp"

#include "glclt/error.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace glclt {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string clean(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  return std::stod(s);
}

}  // namespace

void write_record_header(std::ostream& out, int L, const std::vector<int>& indices) {
  out << "case,n,rep,seed,eps,connected,components,mean_neighbors,neighbor_ratio,ok,error";
  for (int l = 1; l <= L; ++l) out << ",lambda_" << l;
  for (int l : indices) out << ",sigma_hat_sq_" << l;
  out << "\n";
}

void write_record_row(std::ostream& out, const ExperimentRecord& r, int L,
                      const std::vector<int>& indices) {
  std::string line = clean(r.case_label) + "," + std::to_string(r.n) + "," + std::to_string(r.rep) +
                     "," + std::to_string(r.seed) + "," + fmt(r.eps) + "," +
                     (r.connected ? "1" : "0") + "," + std::to_string(r.components) + "," +
                     fmt(r.mean_neighbors) + "," + fmt(r.neighbor_ratio) + "," +
                     (r.ok ? "1" : "0") + "," + clean(r.error);
  for (int l = 1; l <= L; ++l)
    line += "," + fmt(static_cast<std::size_t>(l) <= r.eigenvalues.size() ? r.eigenvalue(l) : std::nan(""));
  for (int l : indices) line += "," + fmt(r.ok ? r.sigma_hat(l) : std::nan(""));
  out << line << "\n";
}

std::vector<ExperimentRecord> read_records(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Io, "record CSV is empty");
  const auto header = split(line);
  require(header.size() >= 11 && header[0] == "case", ErrorCode::Io, "not a record CSV");
  std::vector<int> sigma_idx;
  int L = 0;
  for (std::size_t c = 11; c < header.size(); ++c) {
    if (header[c].rfind("lambda_", 0) == 0) ++L;
    else if (header[c].rfind("sigma_hat_sq_", 0) == 0) sigma_idx.push_back(std::stoi(header[c].substr(13)));
    else throw Error(ErrorCode::Io, "unexpected column " + header[c]);
  }
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    require(f.size() == header.size(), ErrorCode::Io, "ragged record row");
    ExperimentRecord r;
    r.case_label = f[0];
    r.n = std::stoul(f[1]);
    r.rep = std::stoul(f[2]);
    r.seed = std::stoull(f[3]);
    r.eps = to_double(f[4]);
    r.connected = f[5] == "1";
    r.components = std::stoi(f[6]);
    r.mean_neighbors = to_double(f[7]);
    r.neighbor_ratio = to_double(f[8]);
    r.ok = f[9] == "1";
    r.error = f[10];
    std::size_t c = 11;
    if (r.ok) {
      for (int l = 0; l < L; ++l) r.eigenvalues.push_back(to_double(f[c + l]));
      r.indices = sigma_idx;
      for (std::size_t k = 0; k < sigma_idx.size(); ++k)
        r.sigma_hat_sq.push_back(to_double(f[c + L + k]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_timing_header(std::ostream& out) {
  out << "case,n,rep,sample_s,graph_s,solve_s,estimate_s,matvecs\n";
}

void write_timing_row(std::ostream& out, const ExperimentRecord& r) {
  const auto& t = r.timings;
  out << clean(r.case_label) << "," << r.n << "," << r.rep << "," << fmt(t.sample) << ","
      << fmt(t.graph) << "," << fmt(t.solve) << "," << fmt(t.estimate) << "," << t.matvecs << "\n";
}

}  // namespace glclt
