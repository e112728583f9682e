#include "glclt/config.hpp"

#include "glclt/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace glclt {

double EpsRule::operator()(std::size_t n) const {
  return constant * std::pow(static_cast<double>(n), -exponent);
}

std::string EpsRule::describe() const {
  std::ostringstream os;
  os << constant << "*n^-" << exponent;
  return os.str();
}

const char* to_string(CenterMode c) {
  return c == CenterMode::McMean ? "mc_mean" : "analytic_lambda";
}

Kernel KernelSpec::make(int m) const {
  return table.empty() ? Kernel::indicator(m, scaling) : Kernel::tabulated(table, m, scaling);
}

int ExperimentConfig::eigen_count() const {
  int mx = 1;
  for (int l : indices) mx = std::max(mx, l);
  return mx + 1;
}

void ExperimentConfig::validate() const {
  require(!cases.empty(), ErrorCode::InvalidArgument, "config has no cases");
  require(repetitions >= 1, ErrorCode::InvalidArgument, "repetitions must be >= 1");
  require(!indices.empty(), ErrorCode::InvalidArgument, "no eigen indices");
  for (int l : indices) require(l >= 1, ErrorCode::InvalidArgument, "eigen indices are 1-based");
  for (const auto& c : cases) {
    require(!c.label.empty(), ErrorCode::InvalidArgument, "case label must not be empty");
    require(c.eps.exponent > 0 && c.eps.constant > 0, ErrorCode::InvalidArgument,
            "eps rule needs positive constant and exponent");
  }
  if (!theory_only) {
    require(!sample_sizes.empty(), ErrorCode::InvalidArgument, "no sample sizes");
    for (std::size_t n : sample_sizes)
      require(n >= static_cast<std::size_t>(eigen_count()), ErrorCode::InvalidArgument,
              "sample size smaller than the eigenpair count");
  }
}

std::vector<std::string> ExperimentConfig::warnings() const {
  std::vector<std::string> out;
  for (const auto& c : cases)
    for (std::size_t n : sample_sizes)
      if (c.eps(n) > 1.0) {
        std::ostringstream os;
        os << c.label << ": eps(" << n << ") = " << c.eps(n) << " > 1";
        out.push_back(os.str());
      }
  return out;
}

std::vector<std::string> preset_names() {
  return {"normality", "variance-ratio", "estimator-ratio", "small-eps",
          "bias-vs-std", "covariance-heatmap", "sphere8"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.output_dir = "glclt-out/" + name;
  const auto m4 = [](int m) { return 1.0 / (m + 4.0); };
  if (name == "normality") {
    c.cases = {{"circle", Circle{1.0}, {1.0, m4(1)}},
               {"ellipse", Ellipse{1.0, std::numbers::sqrt2}, {1.0, m4(1)}},
               {"sphere2", Sphere{2, 1.0}, {1.0, m4(2)}},
               {"torus", EmbeddedTorus{1.0, 1.0}, {6.0, m4(2)}}};
    c.sample_sizes = {1000, 2000, 4000};
    c.repetitions = 200;
  } else if (name == "variance-ratio") {
    c.cases = {{"circle", Circle{1.0}, {1.0, m4(1)}}};
    c.sample_sizes = {1000, 2000, 3000, 4000, 5000, 6000, 7000};
    c.repetitions = 200;
  } else if (name == "estimator-ratio") {
    c.cases = {{"circle", Circle{1.0}, {1.0, m4(1)}}};
    c.sample_sizes = {1000, 2000, 3000, 4000, 5000, 6000, 7000};
    c.repetitions = 100;
  } else if (name == "small-eps") {
    c.cases = {{"sphere2", Sphere{2, 1.0}, {1.0, 1.0 / 3.0}}};
    c.sample_sizes = {2000, 4000, 8000};
    c.repetitions = 200;
  } else if (name == "bias-vs-std") {
    for (int m = 1; m <= 4; ++m) {
      c.cases.push_back({"sphere" + std::to_string(m) + "-a", Sphere{m, 1.0}, {4.0, 1.0 / 3.5}});
      c.cases.push_back({"sphere" + std::to_string(m) + "-b", Sphere{m, 1.0}, {5.0, 1.0 / (m + 0.5)}});
    }
    c.sample_sizes = {1024, 2048, 4096, 8192, 16384};
    c.repetitions = 100;
    c.center = CenterMode::AnalyticLambda;
  } else if (name == "covariance-heatmap") {
    // Circle and torus with 9 eigenfunctions, the sphere with 49 (degrees 0..6).
    c.cases = {{"circle", Circle{1.0}, {1.0, m4(1)}, 9},
               {"sphere2", Sphere{2, 1.0}, {1.0, m4(2)}, 49},
               {"flat-torus", FlatTorus{{2 * std::numbers::pi, 2 * std::numbers::pi}}, {1.0, m4(2)}, 9}};
    c.theory_only = true;
  } else if (name == "sphere8") {
    c.cases = {{"sphere8", Sphere{8, 1.0}, {1.0, m4(8)}}};
    c.sample_sizes = {16000, 22000, 28000, 32000};
    c.repetitions = 200;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown preset: " + name);
  }
  return c;
}

// ---------------------------------------------------------------------------
// YAML

namespace {

template <class T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (node[key]) out = node[key].as<T>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config parse error: ") + e.what());
  }
  static const std::set<std::string> known{"preset",      "name",        "cases",   "sample_sizes", "kernel",
                                           "indices",     "repetitions", "seed",    "center",       "output_dir",
                                           "threads",     "solver_tol",  "theory_only", "theory_l_max"};
  if (root.IsMap())
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      require(known.count(key) == 1, ErrorCode::InvalidArgument, "unknown config key: " + key);
    }
  ExperimentConfig c;
  if (root["preset"]) c = preset(root["preset"].as<std::string>());
  try {
    read(root, "name", c.name);
    if (root["cases"]) {
      c.cases.clear();
      for (const auto& n : root["cases"]) {
        CaseSpec cs{n["label"].as<std::string>(), parse_manifold(n["manifold"].as<std::string>()), {}};
        if (n["eps"]) {
          read(n["eps"], "constant", cs.eps.constant);
          read(n["eps"], "exponent", cs.eps.exponent);
        }
        read(n, "theory_l_max", cs.theory_l_max);
        c.cases.push_back(std::move(cs));
      }
    }
    read(root, "sample_sizes", c.sample_sizes);
    if (root["kernel"]) {
      const auto& k = root["kernel"];
      if (k["scaling"]) c.kernel.scaling = parse_kernel_scaling(k["scaling"].as<std::string>());
      read(k, "table", c.kernel.table);
    }
    read(root, "indices", c.indices);
    read(root, "repetitions", c.repetitions);
    read(root, "seed", c.master_seed);
    if (root["center"]) {
      const auto s = root["center"].as<std::string>();
      if (s == "mc_mean") c.center = CenterMode::McMean;
      else if (s == "analytic_lambda") c.center = CenterMode::AnalyticLambda;
      else throw Error(ErrorCode::InvalidArgument, "unknown center mode: " + s);
    }
    read(root, "output_dir", c.output_dir);
    read(root, "threads", c.threads);
    read(root, "solver_tol", c.solver_tol);
    read(root, "theory_only", c.theory_only);
    read(root, "theory_l_max", c.theory_l_max);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config error: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "cases" << YAML::Value << YAML::BeginSeq;
  for (const auto& cs : c.cases) {
    out << YAML::BeginMap << YAML::Key << "label" << YAML::Value << cs.label << YAML::Key
        << "manifold" << YAML::Value << cs.manifold.describe() << YAML::Key << "eps" << YAML::Value
        << YAML::Flow << YAML::BeginMap << YAML::Key << "constant" << YAML::Value << cs.eps.constant
        << YAML::Key << "exponent" << YAML::Value << cs.eps.exponent << YAML::EndMap;
    if (cs.theory_l_max > 0) out << YAML::Key << "theory_l_max" << YAML::Value << cs.theory_l_max;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "sample_sizes" << YAML::Value << YAML::Flow << c.sample_sizes;
  out << YAML::Key << "kernel" << YAML::Value << YAML::BeginMap << YAML::Key << "scaling"
      << YAML::Value << to_string(c.kernel.scaling);
  if (!c.kernel.table.empty()) out << YAML::Key << "table" << YAML::Value << YAML::Flow << c.kernel.table;
  out << YAML::EndMap;
  out << YAML::Key << "indices" << YAML::Value << YAML::Flow << c.indices;
  out << YAML::Key << "repetitions" << YAML::Value << c.repetitions;
  out << YAML::Key << "seed" << YAML::Value << c.master_seed;
  out << YAML::Key << "center" << YAML::Value << to_string(c.center);
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  out << YAML::Key << "threads" << YAML::Value << c.threads;
  out << YAML::Key << "solver_tol" << YAML::Value << c.solver_tol;
  out << YAML::Key << "theory_only" << YAML::Value << c.theory_only;
  out << YAML::Key << "theory_l_max" << YAML::Value << c.theory_l_max;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GLCLT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace glclt
