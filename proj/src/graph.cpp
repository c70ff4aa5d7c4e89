#include "bbpl/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bbpl {

GraphTopology::GraphTopology(std::vector<std::size_t> states,
                             const std::vector<std::pair<Vertex, Vertex>>& edges)
    : states_(std::move(states)) {
  const std::size_t n = states_.size();
  for (Vertex s = 0; s < n; ++s) {
    if (states_[s] < 2) {
      throw std::invalid_argument("vertex " + std::to_string(s) + " has fewer than 2 states");
    }
  }
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) {
      throw std::invalid_argument("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") references a vertex outside [0, " + std::to_string(n) + ")");
    }
    if (a == b) {
      throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
    }
    edges_.push_back(a < b ? Edge{a, b} : Edge{b, a});
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return x.u != y.u ? x.u < y.u : x.v < y.v; });
  for (std::size_t e = 1; e < edges_.size(); ++e) {
    if (edges_[e] == edges_[e - 1]) {
      throw std::invalid_argument("duplicate edge (" + std::to_string(edges_[e].u) + "," +
                                  std::to_string(edges_[e].v) + ")");
    }
  }
  adjacency_.resize(n);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    adjacency_[edges_[e].u].push_back({edges_[e].v, e});
    adjacency_[edges_[e].v].push_back({edges_[e].u, e});
  }
}

std::optional<EdgeId> GraphTopology::find_edge(Vertex a, Vertex b) const {
  if (a >= num_vertices() || b >= num_vertices()) return std::nullopt;
  for (const auto& nb : adjacency_[a]) {
    if (nb.vertex == b) return nb.edge;
  }
  return std::nullopt;
}

std::vector<std::string> GraphTopology::check() const {
  std::vector<std::string> out;
  const std::size_t n = num_vertices();
  for (Vertex s = 0; s < n; ++s) {
    if (states_[s] < 2) out.push_back("vertex " + std::to_string(s) + " has fewer than 2 states");
  }
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    if (ed.u >= n || ed.v >= n) out.push_back("edge " + std::to_string(e) + " out of range");
    if (ed.u >= ed.v) out.push_back("edge " + std::to_string(e) + " not canonical or self-loop");
    if (e > 0 && edges_[e - 1] == ed) out.push_back("edge " + std::to_string(e) + " duplicated");
  }
  if (adjacency_.size() != n) {
    out.push_back("adjacency size mismatch");
    return out;
  }
  std::size_t incidences = 0;
  for (Vertex s = 0; s < n; ++s) {
    for (const auto& nb : adjacency_[s]) {
      ++incidences;
      if (nb.edge >= edges_.size()) {
        out.push_back("adjacency of " + std::to_string(s) + " references unknown edge");
        continue;
      }
      const auto& ed = edges_[nb.edge];
      const bool ok = (ed.u == s && ed.v == nb.vertex) || (ed.v == s && ed.u == nb.vertex);
      if (!ok) out.push_back("adjacency of " + std::to_string(s) + " inconsistent with edge list");
    }
  }
  if (incidences != 2 * edges_.size()) out.push_back("adjacency is not symmetric");
  return out;
}

Layout::Layout(const GraphTopology& graph) {
  const std::size_t n = graph.num_vertices();
  const std::size_t m = graph.num_edges();
  unary_offset_.resize(n);
  unary_size_.resize(n);
  std::size_t offset = 0;
  for (Vertex s = 0; s < n; ++s) {
    unary_offset_[s] = offset;
    unary_size_[s] = graph.states(s);
    offset += graph.states(s);
  }
  pair_offset_.resize(m);
  pair_rows_.resize(m);
  pair_cols_.resize(m);
  message_offset_.resize(2 * m);
  message_length_.resize(2 * m);
  std::size_t moff = 0;
  for (EdgeId e = 0; e < m; ++e) {
    const auto& ed = graph.edge(e);
    pair_offset_[e] = offset;
    pair_rows_[e] = graph.states(ed.u);
    pair_cols_[e] = graph.states(ed.v);
    offset += pair_rows_[e] * pair_cols_[e];

    message_offset_[2 * e] = moff;
    message_length_[2 * e] = graph.states(ed.v);
    moff += graph.states(ed.v);
    message_offset_[2 * e + 1] = moff;
    message_length_[2 * e + 1] = graph.states(ed.u);
    moff += graph.states(ed.u);
  }
  size_ = offset;
  message_total_ = moff;
}

Layout flatten_index(const GraphTopology& graph) { return Layout(graph); }

}  // namespace bbpl
