#ifndef BBPL_PARTITION_HPP
#define BBPL_PARTITION_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bbpl/graph.hpp"

namespace bbpl {

/// One step of a block sweep: the directed edge whose message is recomputed,
/// and whether its sender's unary belief belongs to the block (and is thus
/// refreshed before the message is computed).
struct SweepStep {
  DirectedEdge edge;
  bool sender_in_block;
};

/// A sub-network F_i = (V_i, E_i) with its precomputed scatter maps.
///
/// E_i holds every edge with at least one endpoint in V_i. `belief_indices`
/// lists the flat belief/potential coordinates owned by the block (unary
/// slices of V_i in vertex order, then pairwise slices of E_i in edge order);
/// `message_indices` does the same for the message layout.
struct Block {
  std::vector<Vertex> vertices;
  std::vector<EdgeId> edges;
  std::vector<SweepStep> sweep;
  std::vector<std::size_t> belief_indices;
  std::vector<std::size_t> message_indices;
};

/// Builds the block induced by a vertex set (sorted, deduplicated).
Block make_block(const GraphTopology& graph, std::vector<Vertex> vertices);

/// Every vertex and edge of the graph.
Block whole_graph_block(const GraphTopology& graph);

struct BlockPartition {
  std::vector<Block> blocks;

  std::size_t size() const { return blocks.size(); }
  const Block& operator[](std::size_t i) const { return blocks[i]; }
};

BlockPartition partition_from_vertex_sets(const GraphTopology& graph,
                                          const std::vector<std::vector<Vertex>>& vertex_sets);

/// Row-major rows x cols grid tiled into block_rows x block_cols rectangles.
/// Tile extents follow the "first tiles larger" remainder rule.
BlockPartition grid_partition(const GraphTopology& graph, std::size_t rows, std::size_t cols,
                              std::size_t block_rows, std::size_t block_cols);

/// D contiguous index ranges of near-equal size, the first n mod D one larger.
BlockPartition index_partition(const GraphTopology& graph, std::size_t num_blocks);

/// Splits `total` items into `parts` contiguous chunk sizes, first chunks larger.
std::vector<std::size_t> split_sizes(std::size_t total, std::size_t parts);

/// Checks disjoint coverage of V, the incidence rule for every E_i, coverage
/// of E, and that the scatter maps match a recomputation. Empty when valid.
std::vector<std::string> validate(const BlockPartition& partition, const GraphTopology& graph);

/// Copies the block's coordinates out of a full flat vector.
std::vector<double> gather(std::span<const double> full, std::span<const std::size_t> indices);

/// Overwrites the block coordinates of `full` with `sub` in place.
void scatter_into(std::span<double> full, std::span<const std::size_t> indices,
                  std::span<const double> sub);

/// Returns `full` with exactly the block coordinates replaced by `sub`.
std::vector<double> scatter_update(std::span<const double> full, const Block& block,
                                   std::span<const double> sub);

}  // namespace bbpl

#endif  // BBPL_PARTITION_HPP
