#include "bbpl/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace bbpl {

namespace {

Block build_block(const GraphTopology& graph, const Layout& layout, std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  for (Vertex v : vertices) {
    if (v >= graph.num_vertices()) {
      throw std::out_of_range("block vertex " + std::to_string(v) + " outside the graph");
    }
  }
  auto member = [&](Vertex v) { return std::binary_search(vertices.begin(), vertices.end(), v); };

  Block block;
  for (Vertex v : vertices) {
    for (const auto& nb : graph.neighbors(v)) block.edges.push_back(nb.edge);
  }
  std::sort(block.edges.begin(), block.edges.end());
  block.edges.erase(std::unique(block.edges.begin(), block.edges.end()), block.edges.end());

  for (Vertex v : vertices) {
    for (std::size_t a = 0; a < layout.unary_size(v); ++a) {
      block.belief_indices.push_back(layout.unary_offset(v) + a);
    }
  }
  for (EdgeId e : block.edges) {
    const auto& ed = graph.edge(e);
    for (std::size_t j = 0; j < layout.pairwise_size(e); ++j) {
      block.belief_indices.push_back(layout.pairwise_offset(e) + j);
    }
    for (bool reverse : {false, true}) {
      const DirectedEdge d{e, reverse};
      const Vertex sender = reverse ? ed.v : ed.u;
      block.sweep.push_back({d, member(sender)});
      for (std::size_t j = 0; j < layout.message_length(d.id()); ++j) {
        block.message_indices.push_back(layout.message_offset(d.id()) + j);
      }
    }
  }
  block.vertices = std::move(vertices);
  return block;
}

}  // namespace

Block make_block(const GraphTopology& graph, std::vector<Vertex> vertices) {
  return build_block(graph, Layout(graph), std::move(vertices));
}

Block whole_graph_block(const GraphTopology& graph) {
  std::vector<Vertex> all(graph.num_vertices());
  for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
  return make_block(graph, std::move(all));
}

BlockPartition partition_from_vertex_sets(const GraphTopology& graph,
                                          const std::vector<std::vector<Vertex>>& vertex_sets) {
  const Layout layout(graph);
  BlockPartition out;
  out.blocks.reserve(vertex_sets.size());
  for (const auto& vs : vertex_sets) out.blocks.push_back(build_block(graph, layout, vs));
  return out;
}

std::vector<std::size_t> split_sizes(std::size_t total, std::size_t parts) {
  if (parts == 0) throw std::invalid_argument("cannot split into zero parts");
  std::vector<std::size_t> sizes(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++sizes[i];
  return sizes;
}

BlockPartition grid_partition(const GraphTopology& graph, std::size_t rows, std::size_t cols,
                              std::size_t block_rows, std::size_t block_cols) {
  if (block_rows == 0 || block_cols == 0) throw std::invalid_argument("zero block count");
  if (block_rows > rows || block_cols > cols) {
    throw std::invalid_argument("more block rows/cols than grid rows/cols");
  }
  if (rows * cols != graph.num_vertices()) {
    throw std::invalid_argument("graph does not have rows * cols vertices");
  }
  const auto row_sizes = split_sizes(rows, block_rows);
  const auto col_sizes = split_sizes(cols, block_cols);
  std::vector<std::vector<Vertex>> sets;
  std::size_t r0 = 0;
  for (std::size_t br = 0; br < block_rows; ++br) {
    std::size_t c0 = 0;
    for (std::size_t bc = 0; bc < block_cols; ++bc) {
      std::vector<Vertex> tile;
      for (std::size_t r = r0; r < r0 + row_sizes[br]; ++r) {
        for (std::size_t c = c0; c < c0 + col_sizes[bc]; ++c) tile.push_back(r * cols + c);
      }
      sets.push_back(std::move(tile));
      c0 += col_sizes[bc];
    }
    r0 += row_sizes[br];
  }
  return partition_from_vertex_sets(graph, sets);
}

BlockPartition index_partition(const GraphTopology& graph, std::size_t num_blocks) {
  const std::size_t n = graph.num_vertices();
  if (num_blocks < 1 || num_blocks > n) {
    throw std::invalid_argument("block count " + std::to_string(num_blocks) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  std::vector<std::vector<Vertex>> sets;
  Vertex next = 0;
  for (std::size_t size : split_sizes(n, num_blocks)) {
    std::vector<Vertex> range(size);
    for (auto& v : range) v = next++;
    sets.push_back(std::move(range));
  }
  return partition_from_vertex_sets(graph, sets);
}

std::vector<std::string> validate(const BlockPartition& partition, const GraphTopology& graph) {
  std::vector<std::string> out;
  const std::size_t n = graph.num_vertices();
  if (partition.blocks.empty()) out.push_back("partition has no blocks");

  const Layout layout(graph);
  std::vector<int> owner(n, -1);
  std::vector<int> edge_count(graph.num_edges(), 0);
  for (std::size_t i = 0; i < partition.blocks.size(); ++i) {
    const Block& block = partition.blocks[i];
    const std::string tag = "block " + std::to_string(i) + ": ";
    bool in_range = true;
    for (Vertex v : block.vertices) {
      if (v >= n) {
        out.push_back(tag + "vertex " + std::to_string(v) + " outside the graph");
        in_range = false;
        continue;
      }
      if (owner[v] >= 0) {
        out.push_back(tag + "vertex " + std::to_string(v) + " also in block " +
                      std::to_string(owner[v]) + " (blocks not disjoint)");
      }
      owner[v] = static_cast<int>(i);
    }
    for (EdgeId e : block.edges) {
      if (e >= graph.num_edges()) {
        out.push_back(tag + "edge " + std::to_string(e) + " outside the graph");
        in_range = false;
      } else {
        ++edge_count[e];
      }
    }
    if (!in_range) continue;
    const Block expected = build_block(graph, layout, block.vertices);
    if (expected.edges != block.edges) {
      out.push_back(tag + "edge set differs from the edges incident to its vertices");
    }
    if (expected.belief_indices != block.belief_indices ||
        expected.message_indices != block.message_indices) {
      out.push_back(tag + "scatter map differs from recomputation");
    }
    bool sweep_ok = expected.sweep.size() == block.sweep.size();
    for (std::size_t j = 0; sweep_ok && j < block.sweep.size(); ++j) {
      sweep_ok = expected.sweep[j].edge == block.sweep[j].edge &&
                 expected.sweep[j].sender_in_block == block.sweep[j].sender_in_block;
    }
    if (!sweep_ok) out.push_back(tag + "sweep order differs from recomputation");
  }
  for (Vertex v = 0; v < n; ++v) {
    if (owner[v] < 0) out.push_back("vertex " + std::to_string(v) + " not covered by any block");
  }
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    if (edge_count[e] == 0) out.push_back("edge " + std::to_string(e) + " not covered by any block");
  }
  return out;
}

std::vector<double> gather(std::span<const double> full, std::span<const std::size_t> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t j : indices) out.push_back(full[j]);
  return out;
}

void scatter_into(std::span<double> full, std::span<const std::size_t> indices,
                  std::span<const double> sub) {
  if (sub.size() != indices.size()) throw std::invalid_argument("block vector has wrong length");
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= full.size()) throw std::out_of_range("scatter index out of bounds");
    full[indices[j]] = sub[j];
  }
}

std::vector<double> scatter_update(std::span<const double> full, const Block& block,
                                   std::span<const double> sub) {
  std::vector<double> out(full.begin(), full.end());
  scatter_into(out, block.belief_indices, sub);
  return out;
}

}  // namespace bbpl
