#ifndef BBPL_MODEL_HPP
#define BBPL_MODEL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bbpl/graph.hpp"
#include "bbpl/tables.hpp"

namespace bbpl {

using Assignment = std::vector<std::size_t>;

/// Linear map from a shared parameter vector (length K) to the flat potential
/// vector of one graph (length d): theta = M^T theta_shared. M is dense,
/// row-major, K rows by d columns. `labels` is the one-hot sufficient
/// statistics vector y of the observed assignment.
struct FeatureModel {
  std::size_t num_params = 0;  // K
  std::size_t dim = 0;         // d
  std::vector<double> matrix;  // K * d
  std::vector<double> labels;  // d

  double at(std::size_t k, std::size_t j) const { return matrix[k * dim + j]; }
  std::span<const double> row(std::size_t k) const {
    return std::span<const double>(matrix).subspan(k * dim, dim);
  }

  /// M = identity (K = d) with the given labels.
  static FeatureModel identity(std::vector<double> labels);

  /// Lists invariant violations against `graph`: finite M, shape agreement,
  /// 0/1 labels forming a consistent one-hot assignment.
  std::vector<std::string> check(const GraphTopology& graph) const;

  friend bool operator==(const FeatureModel&, const FeatureModel&) = default;
};

/// Fully observed samples of an MRF over a fixed graph.
struct MrfDataset {
  std::vector<Assignment> samples;
};

struct CrfInstance {
  GraphTopology graph;
  FeatureModel features;
};

struct CrfDataset {
  std::vector<CrfInstance> instances;
};

/// One-hot sufficient statistics of a full assignment, in the flat layout.
std::vector<double> sufficient_statistics(const GraphTopology& graph, const Assignment& x);

/// Average one-hot statistics over the samples (MRF case).
std::vector<double> empirical_statistics(const MrfDataset& data, const GraphTopology& graph);

/// (1/N) sum_i M_i y_i (CRF case); length K.
std::vector<double> empirical_statistics(const CrfDataset& data);

/// theta = M^T theta_shared, reshaped onto `graph`.
PotentialVector ground_potentials(std::span<const double> shared, const FeatureModel& fm,
                                  const GraphTopology& graph);

/// Writes (M^T theta_shared)_j for the listed flat indices only.
void ground_potentials_at(std::span<const double> shared, const FeatureModel& fm,
                          std::span<const std::size_t> indices, std::span<double> theta);

/// M v for a flat vector v of length d; returns length K.
std::vector<double> feature_product(const FeatureModel& fm, std::span<const double> v);

/// Dot product of two equal-length vectors.
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace bbpl

#endif  // BBPL_MODEL_HPP
