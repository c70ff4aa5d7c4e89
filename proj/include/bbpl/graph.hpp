#ifndef BBPL_GRAPH_HPP
#define BBPL_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bbpl {

using Vertex = std::size_t;
using EdgeId = std::size_t;

/// Undirected edge in canonical form, u < v.
struct Edge {
  Vertex u;
  Vertex v;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Vertex vertex;
  EdgeId edge;
};

/// Directed view of an undirected edge. `reverse == false` is u -> v for the
/// canonical (u, v); `reverse == true` is v -> u. The flat id is 2e + reverse.
struct DirectedEdge {
  EdgeId edge;
  bool reverse;

  std::size_t id() const { return 2 * edge + (reverse ? 1 : 0); }
  static DirectedEdge from_id(std::size_t id) { return {id / 2, (id % 2) == 1}; }

  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Pairwise graph with per-vertex state counts.
///
/// Edges are canonicalized on construction: each pair is stored with u < v
/// and the edge list is sorted lexicographically, so edge ids do not depend
/// on the order the caller supplied them in.
class GraphTopology {
 public:
  GraphTopology() = default;
  GraphTopology(std::vector<std::size_t> states,
                const std::vector<std::pair<Vertex, Vertex>>& edges);

  std::size_t num_vertices() const { return states_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t states(Vertex s) const { return states_[s]; }
  const std::vector<std::size_t>& state_counts() const { return states_; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(Vertex s) const { return adjacency_[s]; }
  std::size_t degree(Vertex s) const { return adjacency_[s].size(); }

  std::optional<EdgeId> find_edge(Vertex a, Vertex b) const;

  Vertex source(DirectedEdge d) const { return d.reverse ? edges_[d.edge].v : edges_[d.edge].u; }
  Vertex target(DirectedEdge d) const { return d.reverse ? edges_[d.edge].u : edges_[d.edge].v; }

  /// Rechecks the invariants (no self loops, no duplicates, symmetric
  /// adjacency, indices in range); returns a description of each violation.
  std::vector<std::string> check() const;

  friend bool operator==(const GraphTopology& a, const GraphTopology& b) {
    return a.states_ == b.states_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::size_t> states_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Bijection between structured tables and flat vectors.
///
/// Order: all unary slices in vertex order, then all pairwise slices in
/// canonical edge order; pairwise tables are row-major with rows indexed by
/// the state of the lower endpoint. Messages get their own layout, indexed by
/// DirectedEdge::id(), each of length k_target.
class Layout {
 public:
  Layout() = default;
  explicit Layout(const GraphTopology& graph);

  std::size_t size() const { return size_; }
  std::size_t num_vertices() const { return unary_offset_.size(); }
  std::size_t num_edges() const { return pair_offset_.size(); }

  std::size_t unary_offset(Vertex s) const { return unary_offset_[s]; }
  std::size_t unary_size(Vertex s) const { return unary_size_[s]; }
  std::size_t pairwise_offset(EdgeId e) const { return pair_offset_[e]; }
  std::size_t pairwise_rows(EdgeId e) const { return pair_rows_[e]; }
  std::size_t pairwise_cols(EdgeId e) const { return pair_cols_[e]; }
  std::size_t pairwise_size(EdgeId e) const { return pair_rows_[e] * pair_cols_[e]; }

  std::size_t message_size() const { return message_total_; }
  std::size_t message_offset(std::size_t directed_id) const { return message_offset_[directed_id]; }
  std::size_t message_length(std::size_t directed_id) const { return message_length_[directed_id]; }

  friend bool operator==(const Layout&, const Layout&) = default;

 private:
  std::vector<std::size_t> unary_offset_;
  std::vector<std::size_t> unary_size_;
  std::vector<std::size_t> pair_offset_;
  std::vector<std::size_t> pair_rows_;
  std::vector<std::size_t> pair_cols_;
  std::vector<std::size_t> message_offset_;
  std::vector<std::size_t> message_length_;
  std::size_t size_ = 0;
  std::size_t message_total_ = 0;
};

Layout flatten_index(const GraphTopology& graph);

}  // namespace bbpl

#endif  // BBPL_GRAPH_HPP
