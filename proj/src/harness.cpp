#include "glclt/harness.hpp"

#include "glclt/csv.hpp"
#include "glclt/error.hpp"
#include "glclt/estimators.hpp"
#include "glclt/graph.hpp"
#include "glclt/rng.hpp"
#include "glclt/spectra.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

namespace glclt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t hash_string(const std::string& s) {
  // FNV-1a, then mixed; stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

}  // namespace

double ExperimentRecord::sigma_hat(int l) const {
  for (std::size_t k = 0; k < indices.size(); ++k)
    if (indices[k] == l) return sigma_hat_sq[k];
  throw Error(ErrorCode::InvalidArgument, "index " + std::to_string(l) + " not in record");
}

std::uint64_t repetition_seed(std::uint64_t master, const std::string& label, std::size_t n,
                              std::size_t rep) {
  return hash_words({master, hash_string(label), static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(rep)});
}

double predicted_mean_neighbors(const ManifoldSpec& spec, std::size_t n, double eps) {
  const int m = spec.intrinsic_dim();
  const double ball = indicator_sigma_eta(m) * (m + 2.0);
  return static_cast<double>(n - 1) * ball * std::pow(eps, m) / spec.volume();
}

ExperimentRecord run_repetition(const ExperimentConfig& config, const CaseSpec& spec, std::size_t n,
                                std::size_t rep) {
  ExperimentRecord r;
  r.case_label = spec.label;
  r.n = n;
  r.rep = rep;
  r.seed = repetition_seed(config.master_seed, spec.label, n, rep);
  r.eps = spec.eps(n);
  try {
    const int m = spec.manifold.intrinsic_dim();
    auto t0 = Clock::now();
    const PointCloud cloud = sample(spec.manifold, n, r.seed);
    r.timings.sample = seconds_since(t0);

    t0 = Clock::now();
    const EpsGraph graph = build_eps_graph(cloud, r.eps, config.kernel.make(m));
    const LaplacianOperator op = assemble_laplacian(graph, m);
    r.timings.graph = seconds_since(t0);
    r.connected = graph.connected();
    r.components = graph.component_count;
    r.mean_neighbors = graph.mean_neighbors();
    r.neighbor_ratio = r.mean_neighbors / predicted_mean_neighbors(spec.manifold, n, r.eps);

    t0 = Clock::now();
    SolverOptions opts;
    opts.tol = config.solver_tol;
    opts.seed = mix64(r.seed ^ 0x5eed5eed5eed5eedULL);
    const EigenPairs pairs = smallest_eigenpairs(op, config.eigen_count(), opts);
    r.timings.solve = seconds_since(t0);
    r.timings.matvecs = pairs.matvecs;
    r.eigenvalues.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());

    t0 = Clock::now();
    for (int l : config.indices) {
      r.indices.push_back(l);
      r.sigma_hat_sq.push_back(sigma_hat_sq(op, pairs, l).sigma_hat_sq);
    }
    r.timings.estimate = seconds_since(t0);
  } catch (const Error& e) {
    r.ok = false;
    r.error = e.what();
    r.eigenvalues.clear();
    r.indices.clear();
    r.sigma_hat_sq.clear();
  }
  return r;
}

McResult run_mc(const ExperimentConfig& config, const McSinks& sinks) {
  config.validate();
  require(!config.theory_only, ErrorCode::InvalidArgument,
          "theory-only configurations have no Monte-Carlo stage");
  struct Job {
    const CaseSpec* spec;
    std::size_t n, rep;
  };
  std::vector<Job> jobs;
  for (const auto& c : config.cases)
    for (std::size_t n : config.sample_sizes)
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) jobs.push_back({&c, n, rep});

  const int L = config.eigen_count();
  if (sinks.records) write_record_header(*sinks.records, L, config.indices);
  if (sinks.timings) write_timing_header(*sinks.timings);

  std::vector<std::optional<ExperimentRecord>> slots(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t written = 0, done = 0;

  auto worker = [&] {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      ExperimentRecord rec = run_repetition(config, *jobs[j].spec, jobs[j].n, jobs[j].rep);
      std::lock_guard lock(mu);
      slots[j] = std::move(rec);
      ++done;
      // Flush the contiguous completed prefix so the CSV order never depends on scheduling.
      while (written < slots.size() && slots[written]) {
        if (sinks.records) write_record_row(*sinks.records, *slots[written], L, config.indices);
        if (sinks.timings) write_timing_row(*sinks.timings, *slots[written]);
        ++written;
      }
      if (sinks.records) sinks.records->flush();
      if (sinks.progress) sinks.progress(done, jobs.size());
    }
  };

  const int threads = std::min<int>(resolve_threads(config.threads), static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  McResult out;
  out.records.reserve(jobs.size());
  for (auto& s : slots) {
    if (!s->ok) ++out.failed;
    out.records.push_back(std::move(*s));
  }
  return out;
}

}  // namespace glclt
