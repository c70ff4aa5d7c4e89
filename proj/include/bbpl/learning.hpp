#ifndef BBPL_LEARNING_HPP
#define BBPL_LEARNING_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bbpl/graph.hpp"
#include "bbpl/inference.hpp"
#include "bbpl/model.hpp"
#include "bbpl/partition.hpp"
#include "bbpl/tables.hpp"

namespace bbpl {

enum class StepRule { constant, inv_sqrt };

struct StepSchedule {
  StepRule rule = StepRule::constant;
  double alpha = 0.1;

  /// alpha, or alpha / sqrt(t + 1).
  double at(std::size_t t) const;
};

enum class BlockOrder { sequential, random };

struct BlockSchedule {
  BlockOrder order = BlockOrder::sequential;
  std::uint64_t seed = 0;
};

struct LearnConfig {
  StepSchedule step;
  std::size_t max_outer_iters = 10000;
  double grad_tol = 1e-6;
  BlockSchedule blocks;
  BPConfig bp;
  bool backtracking = false;   // halve alpha whenever the objective increases
  bool record_theta = false;   // keep a theta snapshot per iteration

  void validate() const;
};

struct IterationRecord {
  std::size_t t = 0;
  double objective = 0.0;
  double grad_inf_norm = 0.0;
  std::uint64_t msg_updates = 0;      // this iteration
  std::uint64_t msg_updates_cum = 0;
  std::size_t inner_sweeps = 0;
  bool inner_converged = true;
  double wall_ms = 0.0;               // since the trainer started
  long block_id = -1;                 // -1 when not applicable
  double alpha = 0.0;                 // step actually taken after this record
};

struct LearningTrace {
  std::string method;
  std::vector<IterationRecord> iterations;
  std::vector<std::vector<double>> snapshots;  // theta_t, when record_theta
  std::vector<double> theta;                   // final parameters
  bool converged = false;                      // grad_tol reached
  bool inner_converged = true;                 // every inner BP run converged
};

/// t mod D, or a uniform draw from `rng`.
std::size_t select_block(BlockOrder order, std::size_t t, std::size_t num_blocks,
                         std::mt19937_64& rng);

/// Everything a BBPL iteration exposes to an observer, after the block
/// update and before the parameter step.
struct BbplProbe {
  std::size_t t;
  std::size_t block_id;
  std::span<const double> theta;          // theta_t
  const BeliefVector& tau_before;         // beliefs entering the iteration
  const BPState& state;                   // beliefs and messages after the block update
  std::span<const double> gradient;       // incrementally maintained g
};

using BbplObserver = std::function<void(const BbplProbe&)>;

/// Gradient descent on -theta^T w_bar + B(theta) with converged full-graph BP
/// at every step.
LearningTrace train_full_bp(const GraphTopology& graph, std::span<const double> w_bar,
                            const CountingNumbers& rho, const LearnConfig& cfg);

/// Block BP learning. Each iteration runs BP to convergence on one block,
/// overwrites the block's gradient coordinates with tau - w_bar and steps
/// theta with the whole gradient.
LearningTrace train_bbpl(const GraphTopology& graph, std::span<const double> w_bar,
                         const CountingNumbers& rho, const BlockPartition& partition,
                         const LearnConfig& cfg, const BbplObserver& observer = {});

/// One full BP sweep per parameter step.
LearningTrace train_inner_dual(const GraphTopology& graph, std::span<const double> w_bar,
                               const CountingNumbers& rho, const LearnConfig& cfg);

/// Everything a CRF iteration exposes to an observer.
struct CrfProbe {
  std::size_t t;
  std::size_t block_id;
  std::span<const double> theta;               // shared parameters
  const std::vector<BPState>& states;          // per instance, after the update
  std::span<const double> gradient;            // length K
};

using CrfObserver = std::function<void(const CrfProbe&)>;

/// Templated model learning over shared parameters. All instances update the
/// same block index per iteration; `partitions[i]` belongs to instance i and
/// all partitions must have the same number of blocks. The gradient of the
/// averaged negative log-likelihood is maintained incrementally and the
/// per-instance deltas are summed in instance order.
LearningTrace train_crf_bbpl(const CrfDataset& data, const std::vector<CountingNumbers>& rho,
                             const std::vector<BlockPartition>& partitions,
                             const LearnConfig& cfg, const CrfObserver& observer = {});

/// train_crf_bbpl with one whole-graph block per instance.
LearningTrace train_crf_full_bp(const CrfDataset& data, const std::vector<CountingNumbers>& rho,
                                const LearnConfig& cfg, const CrfObserver& observer = {});

/// -theta^T w_bar + B(theta) with B from converged BP, and its gradient
/// -w_bar + tau*. Used by reference computations and finite-difference checks.
struct ObjectiveValue {
  double value;
  std::vector<double> gradient;
  bool converged;
};

ObjectiveValue mrf_objective(const GraphTopology& graph, std::span<const double> theta,
                             std::span<const double> w_bar, const CountingNumbers& rho,
                             const BPConfig& bp);

/// (1/N) sum_i [B(M_i^T theta) - theta^T M_i y_i] and its gradient.
ObjectiveValue crf_objective(const CrfDataset& data, std::span<const double> theta,
                             const std::vector<CountingNumbers>& rho, const BPConfig& bp);

}  // namespace bbpl

#endif  // BBPL_LEARNING_HPP
