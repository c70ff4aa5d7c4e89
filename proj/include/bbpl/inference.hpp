#ifndef BBPL_INFERENCE_HPP
#define BBPL_INFERENCE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "bbpl/graph.hpp"
#include "bbpl/partition.hpp"
#include "bbpl/tables.hpp"

namespace bbpl {

struct BPConfig {
  double tol_msg = 1e-8;        // max |delta lambda| for convergence
  std::size_t max_iters = 10000;  // sweeps
  double damping = 0.0;         // fraction of the old message retained

  void validate() const;
};

struct BPState {
  BeliefVector beliefs;
  MessageSet messages;
  bool converged = false;
  std::size_t iters_used = 0;       // sweeps performed by the last run
  std::uint64_t msg_updates = 0;    // cumulative message-table updates
};

/// Zero messages and uniform beliefs: a consistent starting point.
BPState cold_state(const GraphTopology& graph);

// Kernels. Tables are oriented from the sender's point of view:
// `theta_pair` is the pairwise table with rows indexed by the sender state
// when `sender_is_row`, otherwise by the receiver state.

/// lambda_uv(x_v) = rho_uv * logsumexp_{x_u}[(theta_uv - lambda_vu(x_u)) / rho_uv
///                 + log tau_u(x_u)], gauge-fixed so its maximum entry is 0.
/// Throws std::domain_error on non-finite input.
void update_message(std::span<const double> theta_pair, bool sender_is_row, double rho_edge,
                    std::span<const double> sender_belief, std::span<const double> reverse_message,
                    std::span<double> out);

/// tau_u proportional to exp((theta_u + sum of incoming messages) / exponent).
/// `exponent` is CountingNumbers::belief_exponent(u).
void update_unary_belief(std::span<const double> theta_unary, double exponent,
                         std::span<const std::span<const double>> incoming, std::span<double> out);

/// tau_uv proportional to exp((theta_uv - lambda_uv - lambda_vu) / rho_uv) tau_u tau_v,
/// for the canonical edge (u, v): lambda_uv is indexed by x_v, lambda_vu by x_u.
void update_pairwise_belief(std::span<const double> theta_pair, double rho_edge,
                            std::span<const double> msg_u_to_v, std::span<const double> msg_v_to_u,
                            std::span<const double> tau_u, std::span<const double> tau_v,
                            std::span<double> out);

/// Convenience overloads addressing tables through the graph.
std::vector<double> update_message(const GraphTopology& graph, DirectedEdge d,
                                   const PotentialVector& theta, const CountingNumbers& rho,
                                   std::span<const double> sender_belief,
                                   std::span<const double> reverse_message);
std::vector<double> update_unary_belief(const GraphTopology& graph, Vertex u,
                                        const PotentialVector& theta, const CountingNumbers& rho,
                                        const MessageSet& messages);
std::vector<double> update_pairwise_belief(const GraphTopology& graph, EdgeId e,
                                           const PotentialVector& theta, const CountingNumbers& rho,
                                           const MessageSet& messages,
                                           std::span<const double> tau_u,
                                           std::span<const double> tau_v);

/// Full-graph convex BP. Each sweep visits directed edges in canonical order,
/// refreshing the sender's unary belief and then its outgoing message. Stops
/// when the largest message change falls below tol_msg or after max_iters
/// sweeps; afterwards all unary and pairwise beliefs are recomputed once.
/// Non-convergence is reported through BPState::converged.
BPState run_bp(const GraphTopology& graph, const PotentialVector& theta,
               const CountingNumbers& rho, const BPConfig& cfg,
               const std::optional<BPState>& warm_start = std::nullopt);

/// Same iteration restricted to one block: only beliefs of V_i and messages
/// and pairwise beliefs of E_i are written; everything else is read as a
/// constant. Only in-block messages count toward convergence and msg_updates.
BPState run_block_bp(const GraphTopology& graph, const PotentialVector& theta,
                     const CountingNumbers& rho, const Block& block, BPState state,
                     const BPConfig& cfg);

/// In-place variant used by the trainers.
void run_block_bp_in_place(const GraphTopology& graph, const PotentialVector& theta,
                           const CountingNumbers& rho, const Block& block, BPState& state,
                           const BPConfig& cfg);

/// <theta, tau> + sum_s rho_s H(tau_s) + sum_uv rho_uv H(tau_uv). At the BP
/// fixed point this is the convex surrogate B(theta) of the log-partition.
double free_energy_bound(const GraphTopology& graph, const PotentialVector& theta,
                         const BeliefVector& tau, const CountingNumbers& rho);

/// -theta^T w_bar + free_energy_bound(theta, tau). Throws std::domain_error
/// when tau has entries below -1e-12.
double variational_objective(const GraphTopology& graph, const PotentialVector& theta,
                             const BeliefVector& tau, const CountingNumbers& rho,
                             std::span<const double> w_bar);

}  // namespace bbpl

#endif  // BBPL_INFERENCE_HPP
