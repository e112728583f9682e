#pragma once

#include "glclt/manifolds.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace glclt {

/// Nodes on the manifold with positive surface-measure weights.
///   circle, ellipse: uniform in arc length (default 4096 nodes)
///   sphere:          Gauss rule in cos(theta) times uniform azimuth, recursively
///                    for higher dimensions (default 256 x 512 for the 2-sphere)
///   flat torus:      uniform tensor grid (default 256 per factor)
///   embedded torus:  uniform (theta, phi) grid weighted by r (R + r cos phi)
struct QuadratureGrid {
  std::string manifold;  // ManifoldSpec::describe() of the target
  std::vector<int> resolution;
  Points nodes;
  Eigen::VectorXd weights;

  std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * nodes.cols(), static_cast<std::size_t>(nodes.cols())};
  }
  double total_weight() const;

  /// `resolution` empty selects the defaults above. For spheres the entries
  /// are (polar nodes per level, azimuth nodes); for the flat torus one
  /// entry per factor (or a single entry used for all).
  static QuadratureGrid build(const ManifoldSpec& spec, std::vector<int> resolution = {});
  /// Same family with every resolution entry doubled.
  QuadratureGrid refined(const ManifoldSpec& spec) const;
};

/// Deterministic pairwise (tree) summation.
double pairwise_sum(const double* values, std::size_t count);

/// sum_i w_i f(x_i).
double integrate(const QuadratureGrid& grid, const std::function<double(std::span<const double>)>& f);

/// Gauss nodes/weights for the weight (1 - t^2)^{a} on [-1, 1] (Golub-Welsch).
void gegenbauer_rule(int count, double a, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace glclt
