#include "bbpl/learning.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "bbpl/numeric.hpp"

namespace bbpl {

double StepSchedule::at(std::size_t t) const {
  if (rule == StepRule::inv_sqrt) return alpha / std::sqrt(static_cast<double>(t + 1));
  return alpha;
}

void LearnConfig::validate() const {
  if (!(step.alpha > 0.0) || !std::isfinite(step.alpha)) {
    throw std::invalid_argument("step size must be positive");
  }
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be at least 1");
  bp.validate();
}

std::size_t select_block(BlockOrder order, std::size_t t, std::size_t num_blocks,
                         std::mt19937_64& rng) {
  if (num_blocks < 1) throw std::invalid_argument("need at least one block");
  if (order == BlockOrder::sequential) return t % num_blocks;
  std::uniform_int_distribution<std::size_t> pick(0, num_blocks - 1);
  return pick(rng);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_w_bar(const GraphTopology& graph, std::span<const double> w_bar) {
  if (w_bar.size() != Layout(graph).size()) {
    throw std::invalid_argument("w_bar length does not match the graph layout");
  }
}

// Result of one inference phase inside the MRF loop.
struct InnerResult {
  long block_id = -1;
  bool converged = true;
};

// Shared outer loop of the MRF trainers. `infer` updates `state` for theta_t
// and refreshes the gradient coordinates it owns.
template <typename Infer, typename Observe>
LearningTrace mrf_loop(const std::string& method, const GraphTopology& graph,
                       std::span<const double> w_bar, const CountingNumbers& rho,
                       const LearnConfig& cfg, Infer&& infer, Observe&& observe) {
  cfg.validate();
  check_w_bar(graph, w_bar);
  const auto start = Clock::now();

  LearningTrace trace;
  trace.method = method;
  PotentialVector theta(graph, 0.0);
  BPState state = cold_state(graph);
  std::vector<double> g(theta.size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = state.beliefs.flat()[j] - w_bar[j];

  double scale = 1.0;
  double prev_objective = 0.0;
  for (std::size_t t = 0; t < cfg.max_outer_iters; ++t) {
    const std::uint64_t before = state.msg_updates;
    const InnerResult inner = infer(t, theta, state, g);

    IterationRecord rec;
    rec.t = t;
    rec.objective = variational_objective(graph, theta, state.beliefs, rho, w_bar);
    rec.grad_inf_norm = max_abs(g);
    rec.msg_updates = state.msg_updates - before;
    rec.msg_updates_cum = state.msg_updates;
    rec.inner_sweeps = state.iters_used;
    rec.inner_converged = inner.converged;
    rec.block_id = inner.block_id;
    trace.inner_converged = trace.inner_converged && inner.converged;
    if (cfg.record_theta) trace.snapshots.push_back(theta.values());
    observe(t, inner, theta, state, g);

    if (rec.grad_inf_norm < cfg.grad_tol) {
      rec.wall_ms = elapsed_ms(start);
      trace.iterations.push_back(rec);
      trace.converged = true;
      break;
    }
    if (cfg.backtracking && t > 0 && rec.objective > prev_objective) scale *= 0.5;
    prev_objective = rec.objective;
    const double alpha = cfg.step.at(t) * scale;
    rec.alpha = alpha;
    auto th = theta.flat();
    for (std::size_t j = 0; j < th.size(); ++j) th[j] -= alpha * g[j];
    rec.wall_ms = elapsed_ms(start);
    trace.iterations.push_back(rec);
  }
  trace.theta = theta.values();
  return trace;
}

}  // namespace

LearningTrace train_full_bp(const GraphTopology& graph, std::span<const double> w_bar,
                            const CountingNumbers& rho, const LearnConfig& cfg) {
  const Block all = whole_graph_block(graph);
  auto infer = [&](std::size_t, const PotentialVector& theta, BPState& state,
                   std::vector<double>& g) {
    run_block_bp_in_place(graph, theta, rho, all, state, cfg.bp);
    auto tau = state.beliefs.flat();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = tau[j] - w_bar[j];
    return InnerResult{-1, state.converged};
  };
  auto observe = [](auto&&...) {};
  return mrf_loop("full", graph, w_bar, rho, cfg, infer, observe);
}

LearningTrace train_bbpl(const GraphTopology& graph, std::span<const double> w_bar,
                         const CountingNumbers& rho, const BlockPartition& partition,
                         const LearnConfig& cfg, const BbplObserver& observer) {
  if (partition.size() == 0) throw std::invalid_argument("empty partition");
  std::mt19937_64 rng(cfg.blocks.seed);
  BeliefVector tau_before;
  auto infer = [&](std::size_t t, const PotentialVector& theta, BPState& state,
                   std::vector<double>& g) {
    const std::size_t id = select_block(cfg.blocks.order, t, partition.size(), rng);
    const Block& block = partition[id];
    if (observer) tau_before = state.beliefs;
    run_block_bp_in_place(graph, theta, rho, block, state, cfg.bp);
    auto tau = state.beliefs.flat();
    for (std::size_t j : block.belief_indices) g[j] = tau[j] - w_bar[j];
    return InnerResult{static_cast<long>(id), state.converged};
  };
  auto observe = [&](std::size_t t, const InnerResult& inner, const PotentialVector& theta,
                     const BPState& state, const std::vector<double>& g) {
    if (!observer) return;
    observer(BbplProbe{t, static_cast<std::size_t>(inner.block_id), theta.flat(), tau_before,
                       state, g});
  };
  return mrf_loop("bbpl", graph, w_bar, rho, cfg, infer, observe);
}

LearningTrace train_inner_dual(const GraphTopology& graph, std::span<const double> w_bar,
                               const CountingNumbers& rho, const LearnConfig& cfg) {
  const Block all = whole_graph_block(graph);
  BPConfig one_sweep = cfg.bp;
  one_sweep.max_iters = 1;
  auto infer = [&](std::size_t, const PotentialVector& theta, BPState& state,
                   std::vector<double>& g) {
    run_block_bp_in_place(graph, theta, rho, all, state, one_sweep);
    auto tau = state.beliefs.flat();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = tau[j] - w_bar[j];
    return InnerResult{-1, true};
  };
  auto observe = [](auto&&...) {};
  return mrf_loop("inner-dual", graph, w_bar, rho, cfg, infer, observe);
}

LearningTrace train_crf_bbpl(const CrfDataset& data, const std::vector<CountingNumbers>& rho,
                             const std::vector<BlockPartition>& partitions,
                             const LearnConfig& cfg, const CrfObserver& observer) {
  cfg.validate();
  const std::size_t n = data.instances.size();
  if (n == 0) throw std::invalid_argument("empty CRF dataset");
  if (rho.size() != n || partitions.size() != n) {
    throw std::invalid_argument("need one counting-number set and one partition per instance");
  }
  const std::size_t k = data.instances[0].features.num_params;
  const std::size_t num_blocks = partitions[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& inst = data.instances[i];
    const auto problems = inst.features.check(inst.graph);
    if (!problems.empty()) throw std::invalid_argument("instance " + std::to_string(i) + ": " + problems[0]);
    if (inst.features.num_params != k) throw std::invalid_argument("instances disagree on K");
    if (partitions[i].size() != num_blocks || num_blocks == 0) {
      throw std::invalid_argument("partitions must all have the same nonzero block count");
    }
  }
  const auto start = Clock::now();
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::vector<double> w_bar = empirical_statistics(data);

  LearningTrace trace;
  trace.method = "crf-bbpl";
  std::vector<double> theta(k, 0.0);
  std::vector<BPState> states;
  std::vector<double> g(k);
  for (std::size_t c = 0; c < k; ++c) g[c] = -w_bar[c];
  for (const auto& inst : data.instances) {
    states.push_back(cold_state(inst.graph));
    const auto m_tau = feature_product(inst.features, states.back().beliefs.flat());
    for (std::size_t c = 0; c < k; ++c) g[c] += inv_n * m_tau[c];
  }

  std::mt19937_64 rng(cfg.blocks.seed);
  std::vector<std::vector<double>> deltas(n, std::vector<double>(k));
  std::vector<double> old_block;
  double scale = 1.0;
  double prev_objective = 0.0;
  std::uint64_t cum = 0;
  for (std::size_t t = 0; t < cfg.max_outer_iters; ++t) {
    const std::size_t id = select_block(cfg.blocks.order, t, num_blocks, rng);
    IterationRecord rec;
    rec.t = t;
    rec.block_id = static_cast<long>(id);
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& inst = data.instances[i];
      const Block& block = partitions[i][id];
      const PotentialVector grounded = ground_potentials(theta, inst.features, inst.graph);
      BPState& state = states[i];
      old_block = gather(state.beliefs.flat(), block.belief_indices);
      const std::uint64_t before = state.msg_updates;
      run_block_bp_in_place(inst.graph, grounded, rho[i], block, state, cfg.bp);
      rec.msg_updates += state.msg_updates - before;
      rec.inner_sweeps = std::max(rec.inner_sweeps, state.iters_used);
      rec.inner_converged = rec.inner_converged && state.converged;

      auto tau = state.beliefs.flat();
      std::fill(deltas[i].begin(), deltas[i].end(), 0.0);
      for (std::size_t c = 0; c < k; ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < block.belief_indices.size(); ++j) {
          const std::size_t idx = block.belief_indices[j];
          acc += inst.features.at(c, idx) * (tau[idx] - old_block[j]);
        }
        deltas[i][c] = acc;
      }
      bound += free_energy_bound(inst.graph, grounded, state.beliefs, rho[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) g[c] += inv_n * deltas[i][c];
    }
    cum += rec.msg_updates;
    rec.msg_updates_cum = cum;
    rec.objective = inv_n * bound - dot(theta, w_bar);
    rec.grad_inf_norm = max_abs(g);
    trace.inner_converged = trace.inner_converged && rec.inner_converged;
    if (cfg.record_theta) trace.snapshots.push_back(theta);
    if (observer) observer(CrfProbe{t, id, theta, states, g});

    if (rec.grad_inf_norm < cfg.grad_tol) {
      rec.wall_ms = elapsed_ms(start);
      trace.iterations.push_back(rec);
      trace.converged = true;
      break;
    }
    if (cfg.backtracking && t > 0 && rec.objective > prev_objective) scale *= 0.5;
    prev_objective = rec.objective;
    rec.alpha = cfg.step.at(t) * scale;
    for (std::size_t c = 0; c < k; ++c) theta[c] -= rec.alpha * g[c];
    rec.wall_ms = elapsed_ms(start);
    trace.iterations.push_back(rec);
  }
  trace.theta = theta;
  return trace;
}

LearningTrace train_crf_full_bp(const CrfDataset& data, const std::vector<CountingNumbers>& rho,
                                const LearnConfig& cfg, const CrfObserver& observer) {
  std::vector<BlockPartition> whole;
  for (const auto& inst : data.instances) whole.push_back(BlockPartition{{whole_graph_block(inst.graph)}});
  LearningTrace trace = train_crf_bbpl(data, rho, whole, cfg, observer);
  trace.method = "crf-full";
  return trace;
}

ObjectiveValue mrf_objective(const GraphTopology& graph, std::span<const double> theta,
                             std::span<const double> w_bar, const CountingNumbers& rho,
                             const BPConfig& bp) {
  check_w_bar(graph, w_bar);
  const PotentialVector pot(graph, std::vector<double>(theta.begin(), theta.end()));
  const BPState state = run_bp(graph, pot, rho, bp);
  ObjectiveValue out;
  out.value = variational_objective(graph, pot, state.beliefs, rho, w_bar);
  out.gradient.resize(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) out.gradient[j] = state.beliefs.flat()[j] - w_bar[j];
  out.converged = state.converged;
  return out;
}

ObjectiveValue crf_objective(const CrfDataset& data, std::span<const double> theta,
                             const std::vector<CountingNumbers>& rho, const BPConfig& bp) {
  const std::size_t n = data.instances.size();
  if (n == 0 || rho.size() != n) throw std::invalid_argument("need one counting-number set per instance");
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto w_bar = empirical_statistics(data);
  ObjectiveValue out{-dot(theta, w_bar), std::vector<double>(theta.size()), true};
  for (std::size_t c = 0; c < theta.size(); ++c) out.gradient[c] = -w_bar[c];
  for (std::size_t i = 0; i < n; ++i) {
    const auto& inst = data.instances[i];
    const PotentialVector grounded = ground_potentials(theta, inst.features, inst.graph);
    const BPState state = run_bp(inst.graph, grounded, rho[i], bp);
    out.converged = out.converged && state.converged;
    out.value += inv_n * free_energy_bound(inst.graph, grounded, state.beliefs, rho[i]);
    const auto m_tau = feature_product(inst.features, state.beliefs.flat());
    for (std::size_t c = 0; c < theta.size(); ++c) out.gradient[c] += inv_n * m_tau[c];
  }
  return out;
}

}  // namespace bbpl
