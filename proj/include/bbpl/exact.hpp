#ifndef BBPL_EXACT_HPP
#define BBPL_EXACT_HPP

#include <cstddef>

#include "bbpl/graph.hpp"
#include "bbpl/tables.hpp"

namespace bbpl {

/// Largest joint state space the enumeration oracle will walk.
inline constexpr double kEnumerationLimit = 1e7;

/// log sum_x exp(score(x)) by exhaustive enumeration in log space.
/// Throws StateSpaceTooLarge above kEnumerationLimit joint states.
double exact_log_partition(const GraphTopology& graph, const PotentialVector& theta);

/// Exact unary and pairwise marginals of p(x | theta) by enumeration.
BeliefVector exact_marginals(const GraphTopology& graph, const PotentialVector& theta);

/// Max over edges of |u - v|: the window a sequential sweep in vertex order
/// has to carry.
std::size_t bandwidth(const GraphTopology& graph);

/// Exact log-partition and marginals by a forward-backward sweep over the
/// vertex order, carrying the joint state of the last `bandwidth(graph)`
/// vertices. Handles e.g. a 6x6 grid (64-state window) that is far beyond
/// enumeration. Throws StateSpaceTooLarge when the window exceeds
/// kEnumerationLimit states.
double banded_log_partition(const GraphTopology& graph, const PotentialVector& theta);
BeliefVector banded_marginals(const GraphTopology& graph, const PotentialVector& theta);

}  // namespace bbpl

#endif  // BBPL_EXACT_HPP
