#include "bbpl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bbpl/model.hpp"
#include "bbpl/numeric.hpp"

namespace bbpl {

void BPConfig::validate() const {
  if (!(tol_msg > 0.0)) throw std::invalid_argument("tol_msg must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(damping >= 0.0 && damping < 1.0)) throw std::invalid_argument("damping must be in [0, 1)");
}

BPState cold_state(const GraphTopology& graph) {
  BPState state;
  state.beliefs = BeliefVector::uniform(graph);
  state.messages = MessageSet(graph, 0.0);
  return state;
}

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string("non-finite value in ") + what);
}

// Message into `u` from its neighbor across edge e.
DirectedEdge incoming(const GraphTopology& graph, EdgeId e, Vertex u) {
  return DirectedEdge{e, graph.edge(e).u == u};
}

void refresh_unary(const GraphTopology& graph, const PotentialVector& theta,
                   const CountingNumbers& rho, const MessageSet& messages, Vertex u,
                   std::span<double> out) {
  auto th = theta.unary(u);
  std::copy(th.begin(), th.end(), out.begin());
  for (const auto& nb : graph.neighbors(u)) {
    auto msg = messages[incoming(graph, nb.edge, u)];
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += msg[a];
  }
  const double inv = 1.0 / rho.belief_exponent(u);
  for (double& x : out) {
    x *= inv;
    require_finite(x, "unary belief update");
  }
  softmax_in_place(out);
}

void refresh_pairwise(const GraphTopology& graph, const PotentialVector& theta,
                      const CountingNumbers& rho, BPState& state, EdgeId e) {
  const auto& ed = graph.edge(e);
  update_pairwise_belief(theta.pairwise(e), rho.edge(e), state.messages[DirectedEdge{e, false}],
                         state.messages[DirectedEdge{e, true}], state.beliefs.unary(ed.u),
                         state.beliefs.unary(ed.v), state.beliefs.pairwise(e));
}

void check_block(const GraphTopology& graph, const Block& block) {
  for (Vertex v : block.vertices) {
    if (v >= graph.num_vertices()) throw std::out_of_range("block vertex outside the graph");
  }
  for (EdgeId e : block.edges) {
    if (e >= graph.num_edges()) throw std::out_of_range("block edge outside the graph");
  }
  for (const auto& step : block.sweep) {
    if (step.edge.edge >= graph.num_edges()) throw std::out_of_range("block sweep outside the graph");
  }
}

}  // namespace

void update_message(std::span<const double> theta_pair, bool sender_is_row, double rho_edge,
                    std::span<const double> sender_belief, std::span<const double> reverse_message,
                    std::span<double> out) {
  const std::size_t ks = sender_belief.size();
  const std::size_t kr = out.size();
  if (theta_pair.size() != ks * kr || reverse_message.size() != ks) {
    throw std::invalid_argument("message update: table shapes disagree");
  }
  const double inv = 1.0 / rho_edge;
  for (std::size_t xr = 0; xr < kr; ++xr) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t xs = 0; xs < ks; ++xs) {
      const double t = sender_is_row ? theta_pair[xs * kr + xr] : theta_pair[xr * ks + xs];
      const double term = (t - reverse_message[xs]) * inv +
                          std::log(std::max(sender_belief[xs], kBeliefFloor));
      best = std::max(best, term);
    }
    double acc = 0.0;
    for (std::size_t xs = 0; xs < ks; ++xs) {
      const double t = sender_is_row ? theta_pair[xs * kr + xr] : theta_pair[xr * ks + xs];
      const double term = (t - reverse_message[xs]) * inv +
                          std::log(std::max(sender_belief[xs], kBeliefFloor));
      acc += std::exp(term - best);
    }
    out[xr] = rho_edge * (best + std::log(acc));
    require_finite(out[xr], "message update");
  }
  const double top = *std::max_element(out.begin(), out.end());
  for (double& x : out) x -= top;
}

void update_unary_belief(std::span<const double> theta_unary, double exponent,
                         std::span<const std::span<const double>> incoming_msgs,
                         std::span<double> out) {
  if (out.size() != theta_unary.size()) throw std::invalid_argument("unary belief: shape mismatch");
  std::copy(theta_unary.begin(), theta_unary.end(), out.begin());
  for (auto msg : incoming_msgs) {
    if (msg.size() != out.size()) throw std::invalid_argument("unary belief: message shape mismatch");
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += msg[a];
  }
  for (double& x : out) {
    x /= exponent;
    require_finite(x, "unary belief update");
  }
  softmax_in_place(out);
}

void update_pairwise_belief(std::span<const double> theta_pair, double rho_edge,
                            std::span<const double> msg_u_to_v, std::span<const double> msg_v_to_u,
                            std::span<const double> tau_u, std::span<const double> tau_v,
                            std::span<double> out) {
  const std::size_t ku = tau_u.size();
  const std::size_t kv = tau_v.size();
  if (theta_pair.size() != ku * kv || out.size() != ku * kv || msg_u_to_v.size() != kv ||
      msg_v_to_u.size() != ku) {
    throw std::invalid_argument("pairwise belief: table shapes disagree");
  }
  const double inv = 1.0 / rho_edge;
  for (std::size_t a = 0; a < ku; ++a) {
    const double log_tu = std::log(std::max(tau_u[a], kBeliefFloor));
    for (std::size_t b = 0; b < kv; ++b) {
      const double x = (theta_pair[a * kv + b] - msg_u_to_v[b] - msg_v_to_u[a]) * inv + log_tu +
                       std::log(std::max(tau_v[b], kBeliefFloor));
      require_finite(x, "pairwise belief update");
      out[a * kv + b] = x;
    }
  }
  softmax_in_place(out);
}

std::vector<double> update_message(const GraphTopology& graph, DirectedEdge d,
                                   const PotentialVector& theta, const CountingNumbers& rho,
                                   std::span<const double> sender_belief,
                                   std::span<const double> reverse_message) {
  std::vector<double> out(graph.states(graph.target(d)));
  update_message(theta.pairwise(d.edge), !d.reverse, rho.edge(d.edge), sender_belief,
                 reverse_message, out);
  return out;
}

std::vector<double> update_unary_belief(const GraphTopology& graph, Vertex u,
                                        const PotentialVector& theta, const CountingNumbers& rho,
                                        const MessageSet& messages) {
  std::vector<double> out(graph.states(u));
  refresh_unary(graph, theta, rho, messages, u, out);
  return out;
}

std::vector<double> update_pairwise_belief(const GraphTopology& /*graph*/, EdgeId e,
                                           const PotentialVector& theta, const CountingNumbers& rho,
                                           const MessageSet& messages,
                                           std::span<const double> tau_u,
                                           std::span<const double> tau_v) {
  std::vector<double> out(theta.pairwise(e).size());
  update_pairwise_belief(theta.pairwise(e), rho.edge(e), messages[DirectedEdge{e, false}],
                         messages[DirectedEdge{e, true}], tau_u, tau_v, out);
  return out;
}

void run_block_bp_in_place(const GraphTopology& graph, const PotentialVector& theta,
                           const CountingNumbers& rho, const Block& block, BPState& state,
                           const BPConfig& cfg) {
  cfg.validate();
  check_block(graph, block);
  std::size_t max_k = 0;
  for (std::size_t k : graph.state_counts()) max_k = std::max(max_k, k);
  std::vector<double> fresh(max_k);

  state.converged = false;
  state.iters_used = 0;
  if (block.sweep.empty()) {
    state.converged = true;
  } else {
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
      double delta = 0.0;
      for (const auto& step : block.sweep) {
        const Vertex u = graph.source(step.edge);
        auto tau_u = state.beliefs.unary(u);
        if (step.sender_in_block) refresh_unary(graph, theta, rho, state.messages, u, tau_u);
        const DirectedEdge reverse{step.edge.edge, !step.edge.reverse};
        auto msg = state.messages[step.edge];
        std::span<double> out(fresh.data(), msg.size());
        update_message(theta.pairwise(step.edge.edge), !step.edge.reverse, rho.edge(step.edge.edge),
                       tau_u, state.messages[reverse], out);
        for (std::size_t j = 0; j < msg.size(); ++j) {
          const double next = cfg.damping == 0.0 ? out[j] : (1.0 - cfg.damping) * out[j] + cfg.damping * msg[j];
          delta = std::max(delta, std::abs(next - msg[j]));
          msg[j] = next;
        }
        ++state.msg_updates;
      }
      state.iters_used = it;
      if (delta < cfg.tol_msg) {
        state.converged = true;
        break;
      }
    }
  }
  for (Vertex v : block.vertices) refresh_unary(graph, theta, rho, state.messages, v, state.beliefs.unary(v));
  for (EdgeId e : block.edges) refresh_pairwise(graph, theta, rho, state, e);
}

BPState run_block_bp(const GraphTopology& graph, const PotentialVector& theta,
                     const CountingNumbers& rho, const Block& block, BPState state,
                     const BPConfig& cfg) {
  run_block_bp_in_place(graph, theta, rho, block, state, cfg);
  return state;
}

BPState run_bp(const GraphTopology& graph, const PotentialVector& theta,
               const CountingNumbers& rho, const BPConfig& cfg,
               const std::optional<BPState>& warm_start) {
  BPState state = warm_start ? *warm_start : cold_state(graph);
  run_block_bp_in_place(graph, theta, rho, whole_graph_block(graph), state, cfg);
  return state;
}

double free_energy_bound(const GraphTopology& graph, const PotentialVector& theta,
                         const BeliefVector& tau, const CountingNumbers& rho) {
  double value = dot(theta.flat(), tau.flat());
  for (Vertex s = 0; s < graph.num_vertices(); ++s) value += rho.vertex(s) * entropy(tau.unary(s));
  for (EdgeId e = 0; e < graph.num_edges(); ++e) value += rho.edge(e) * entropy(tau.pairwise(e));
  return value;
}

double variational_objective(const GraphTopology& graph, const PotentialVector& theta,
                             const BeliefVector& tau, const CountingNumbers& rho,
                             std::span<const double> w_bar) {
  if (w_bar.size() != theta.size() || tau.size() != theta.size()) {
    throw std::invalid_argument("variational objective: vector lengths disagree");
  }
  for (double t : tau.flat()) {
    if (t < -1e-12) throw std::domain_error("belief vector has negative entries");
  }
  return -dot(theta.flat(), w_bar) + free_energy_bound(graph, theta, tau, rho);
}

}  // namespace bbpl
