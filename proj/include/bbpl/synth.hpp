#ifndef BBPL_SYNTH_HPP
#define BBPL_SYNTH_HPP

#include <cstddef>
#include <cstdint>

#include "bbpl/graph.hpp"
#include "bbpl/model.hpp"
#include "bbpl/tables.hpp"

namespace bbpl {

/// 4-connected rows x cols lattice, vertex r * cols + c, k states per vertex.
GraphTopology gen_grid(std::size_t rows, std::size_t cols, std::size_t k = 2);

/// Preferential attachment: a complete graph on m + 1 vertices, then each new
/// vertex links to m distinct earlier vertices drawn proportionally to degree.
/// Vertex ids follow generation order.
GraphTopology gen_ba(std::size_t n, std::size_t m, std::uint64_t seed, std::size_t k = 2);

/// Every unary and pairwise entry drawn i.i.d. from N(0, scale^2).
PotentialVector gen_true_params(const GraphTopology& graph, double scale, std::uint64_t seed);

struct GibbsConfig {
  std::size_t burn_in = 1000;  // sweeps discarded
  std::size_t thin = 10;       // sweeps between kept samples
};

/// Single-site Gibbs sampling with sweeps in vertex order, started from a
/// uniformly random assignment.
MrfDataset gibbs_sample(const GraphTopology& graph, const PotentialVector& theta,
                        std::size_t n_samples, const GibbsConfig& cfg, std::uint64_t seed);

}  // namespace bbpl

#endif  // BBPL_SYNTH_HPP
