#ifndef BBPL_TESTS_HELPERS_HPP
#define BBPL_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "bbpl/graph.hpp"
#include "bbpl/tables.hpp"

namespace testing {

inline bbpl::GraphTopology random_tree(std::mt19937& rng, std::size_t n, std::size_t k) {
  std::vector<std::pair<bbpl::Vertex, bbpl::Vertex>> edges;
  for (bbpl::Vertex v = 1; v < n; ++v) {
    std::uniform_int_distribution<bbpl::Vertex> parent(0, v - 1);
    edges.emplace_back(parent(rng), v);
  }
  return bbpl::GraphTopology(std::vector<std::size_t>(n, k), edges);
}

/// Random graph that always contains a cycle when n >= 3.
inline bbpl::GraphTopology random_loopy(std::mt19937& rng, std::size_t n, std::size_t k,
                                        double p) {
  std::vector<std::pair<bbpl::Vertex, bbpl::Vertex>> edges;
  std::bernoulli_distribution coin(p);
  for (bbpl::Vertex u = 0; u < n; ++u) {
    for (bbpl::Vertex v = u + 1; v < n; ++v) {
      const bool ring = v == u + 1 || (u == 0 && v == n - 1);
      if (ring || coin(rng)) edges.emplace_back(u, v);
    }
  }
  return bbpl::GraphTopology(std::vector<std::size_t>(n, k), edges);
}

inline bbpl::PotentialVector random_theta(std::mt19937& rng, const bbpl::GraphTopology& g,
                                          double scale = 1.0) {
  bbpl::PotentialVector theta(g, 0.0);
  std::normal_distribution<double> normal(0.0, scale);
  for (double& x : theta.flat()) x = normal(rng);
  return theta;
}

inline double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace testing


#include "bbpl/model.hpp"

namespace testing {

/// Templated CRF instance with K = 3 shared parameters:
///   0: scalar vertex feature f_s on state 1,  1: bias on state 1,
///   2: Potts agreement on every edge.
inline bbpl::CrfInstance templated_instance(const bbpl::GraphTopology& g,
                                            const std::vector<double>& f,
                                            const bbpl::Assignment& y) {
  const bbpl::Layout layout(g);
  bbpl::FeatureModel fm;
  fm.num_params = 3;
  fm.dim = layout.size();
  fm.matrix.assign(3 * fm.dim, 0.0);
  for (bbpl::Vertex s = 0; s < g.num_vertices(); ++s) {
    fm.matrix[0 * fm.dim + layout.unary_offset(s) + 1] = f[s];
    fm.matrix[1 * fm.dim + layout.unary_offset(s) + 1] = 1.0;
  }
  for (bbpl::EdgeId e = 0; e < g.num_edges(); ++e) {
    for (std::size_t a = 0; a < layout.pairwise_rows(e) && a < layout.pairwise_cols(e); ++a) {
      fm.matrix[2 * fm.dim + layout.pairwise_offset(e) + a * layout.pairwise_cols(e) + a] = 1.0;
    }
  }
  fm.labels = bbpl::sufficient_statistics(g, y);
  return bbpl::CrfInstance{g, fm};
}

/// Two 4-cycle instances whose labels are not separable by the features, so
/// the maximum-likelihood parameters are finite.
inline bbpl::CrfDataset templated_dataset() {
  const bbpl::GraphTopology g({2, 2, 2, 2}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  bbpl::CrfDataset data;
  data.instances.push_back(templated_instance(g, {0.5, -1.0, 2.0, 0.3}, {1, 0, 1, 1}));
  data.instances.push_back(templated_instance(g, {-0.7, 1.2, 0.1, -2.0}, {1, 1, 0, 0}));
  return data;
}

}  // namespace testing

#endif  // BBPL_TESTS_HELPERS_HPP
