#include "bbpl/model.hpp"

#include <cmath>
#include <stdexcept>

namespace bbpl {

FeatureModel FeatureModel::identity(std::vector<double> labels) {
  FeatureModel fm;
  fm.num_params = labels.size();
  fm.dim = labels.size();
  fm.matrix.assign(fm.num_params * fm.dim, 0.0);
  for (std::size_t j = 0; j < fm.dim; ++j) fm.matrix[j * fm.dim + j] = 1.0;
  fm.labels = std::move(labels);
  return fm;
}

std::vector<std::string> FeatureModel::check(const GraphTopology& graph) const {
  std::vector<std::string> out;
  const Layout layout(graph);
  if (dim != layout.size()) {
    out.push_back("feature dim " + std::to_string(dim) + " != potential length " +
                  std::to_string(layout.size()));
    return out;
  }
  if (matrix.size() != num_params * dim) out.push_back("feature matrix is not K x d");
  if (labels.size() != dim) {
    out.push_back("label vector has wrong length");
    return out;
  }
  for (double m : matrix) {
    if (!std::isfinite(m)) {
      out.push_back("feature matrix has a non-finite entry");
      break;
    }
  }
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) {
      out.push_back("label entries must be 0 or 1");
      return out;
    }
  }
  Assignment x(graph.num_vertices(), 0);
  for (Vertex s = 0; s < graph.num_vertices(); ++s) {
    double sum = 0.0;
    for (std::size_t a = 0; a < layout.unary_size(s); ++a) {
      if (labels[layout.unary_offset(s) + a] == 1.0) x[s] = a;
      sum += labels[layout.unary_offset(s) + a];
    }
    if (sum != 1.0) out.push_back("unary labels of vertex " + std::to_string(s) + " do not sum to 1");
  }
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& ed = graph.edge(e);
    const std::size_t off = layout.pairwise_offset(e);
    double sum = 0.0;
    for (std::size_t j = 0; j < layout.pairwise_size(e); ++j) sum += labels[off + j];
    if (sum != 1.0) {
      out.push_back("pairwise labels of edge " + std::to_string(e) + " do not sum to 1");
    } else if (labels[off + x[ed.u] * layout.pairwise_cols(e) + x[ed.v]] != 1.0) {
      out.push_back("pairwise labels of edge " + std::to_string(e) +
                    " disagree with the vertex labels");
    }
  }
  return out;
}

std::vector<double> sufficient_statistics(const GraphTopology& graph, const Assignment& x) {
  if (x.size() != graph.num_vertices()) {
    throw std::invalid_argument("assignment has " + std::to_string(x.size()) +
                                " entries, graph has " + std::to_string(graph.num_vertices()));
  }
  const Layout layout(graph);
  std::vector<double> w(layout.size(), 0.0);
  for (Vertex s = 0; s < graph.num_vertices(); ++s) {
    if (x[s] >= graph.states(s)) {
      throw std::out_of_range("assignment value " + std::to_string(x[s]) + " out of range at vertex " +
                              std::to_string(s));
    }
    w[layout.unary_offset(s) + x[s]] = 1.0;
  }
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& ed = graph.edge(e);
    w[layout.pairwise_offset(e) + x[ed.u] * layout.pairwise_cols(e) + x[ed.v]] = 1.0;
  }
  return w;
}

std::vector<double> empirical_statistics(const MrfDataset& data, const GraphTopology& graph) {
  if (data.samples.empty()) throw std::invalid_argument("empty dataset");
  const Layout layout(graph);
  std::vector<double> counts(layout.size(), 0.0);
  for (const auto& x : data.samples) {
    const auto w = sufficient_statistics(graph, x);
    for (std::size_t j = 0; j < w.size(); ++j) counts[j] += w[j];
  }
  const double n = static_cast<double>(data.samples.size());
  for (double& c : counts) c /= n;
  return counts;
}

std::vector<double> empirical_statistics(const CrfDataset& data) {
  if (data.instances.empty()) throw std::invalid_argument("empty dataset");
  const std::size_t K = data.instances.front().features.num_params;
  std::vector<double> total(K, 0.0);
  for (const auto& inst : data.instances) {
    if (inst.features.num_params != K) throw std::invalid_argument("instances disagree on K");
    const auto my = feature_product(inst.features, inst.features.labels);
    for (std::size_t k = 0; k < K; ++k) total[k] += my[k];
  }
  const double n = static_cast<double>(data.instances.size());
  for (double& t : total) t /= n;
  return total;
}

PotentialVector ground_potentials(std::span<const double> shared, const FeatureModel& fm,
                                  const GraphTopology& graph) {
  if (shared.size() != fm.num_params) {
    throw std::invalid_argument("shared parameter length " + std::to_string(shared.size()) +
                                " != K = " + std::to_string(fm.num_params));
  }
  PotentialVector theta(graph);
  if (fm.dim != theta.size() || fm.matrix.size() != fm.num_params * fm.dim) {
    throw std::invalid_argument("feature matrix shape does not match the graph");
  }
  auto out = theta.flat();
  for (std::size_t k = 0; k < fm.num_params; ++k) {
    const double w = shared[k];
    auto r = fm.row(k);
    for (std::size_t j = 0; j < fm.dim; ++j) out[j] += w * r[j];
  }
  return theta;
}

void ground_potentials_at(std::span<const double> shared, const FeatureModel& fm,
                          std::span<const std::size_t> indices, std::span<double> theta) {
  for (std::size_t j : indices) {
    double acc = 0.0;
    for (std::size_t k = 0; k < fm.num_params; ++k) acc += shared[k] * fm.at(k, j);
    theta[j] = acc;
  }
}

std::vector<double> feature_product(const FeatureModel& fm, std::span<const double> v) {
  if (v.size() != fm.dim) throw std::invalid_argument("vector length does not match feature dim");
  std::vector<double> out(fm.num_params, 0.0);
  for (std::size_t k = 0; k < fm.num_params; ++k) out[k] = dot(fm.row(k), v);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace bbpl
