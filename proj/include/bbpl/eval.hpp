#ifndef BBPL_EVAL_HPP
#define BBPL_EVAL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bbpl/learning.hpp"

namespace bbpl {

/// ||theta_t - theta_ref||_2 for every snapshot. Throws std::invalid_argument
/// when the trace has no snapshots.
std::vector<double> distance_trace(const LearningTrace& trace, std::span<const double> theta_ref);

double l2_distance(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

struct LyapunovConfig {
  double beta = 1.0;  // strong convexity
  double eta = 1.0;   // smoothness
  double c = 0.5;     // contraction constant

  void validate() const;
};

struct LyapunovParams {
  double gamma;       // beta / (2 (1 - c) eta^2)
  double alpha_max;   // min{c beta / (2 eta^2 + eta beta + beta^2), 2 / (eta + beta)}

  /// beta * alpha / 2 for a chosen step size.
  double delta(double beta, double alpha) const { return beta * alpha / 2.0; }
};

/// Throws std::invalid_argument on constraint violations and
/// std::domain_error when gamma is not finite.
LyapunovParams lyapunov_params(const LyapunovConfig& cfg);

struct ContractionRun {
  LearningTrace trace;
  /// r_t = ||tau_t - tau*_t|| / ||tau_{t-1} - tau*_t||, where tau*_t is the
  /// converged full-graph BP solution at theta_t; nullopt when the
  /// denominator is below 1e-12.
  std::vector<std::optional<double>> ratios;

  /// Fraction of defined ratios strictly below one.
  double fraction_below_one() const;
  std::size_t defined() const;
};

/// BBPL with a full BP reference solve at every iteration. `also` sees every
/// probe after the ratio is recorded.
ContractionRun contraction_ratios(const GraphTopology& graph, std::span<const double> w_bar,
                                  const CountingNumbers& rho, const BlockPartition& partition,
                                  const LearnConfig& cfg, const BbplObserver& also = {});

struct WorkRow {
  std::string method;
  std::size_t outer_iters = 0;
  std::uint64_t msg_updates = 0;
  double wall_ms = 0.0;
  double final_objective = 0.0;
  double final_grad = 0.0;
  bool converged = false;
};

std::vector<WorkRow> work_report(const std::vector<LearningTrace>& traces);

void write_work_report_csv(std::ostream& os, const std::vector<WorkRow>& rows);

/// One row per iteration:
/// t,method,objective,grad_inf_norm,msg_updates_cum,wall_ms,dist_to_opt,block_id,contraction_ratio
/// dist_to_opt and contraction_ratio are left empty when not available.
void write_trace_csv(std::ostream& os, const LearningTrace& trace,
                     std::span<const double> distances = {},
                     std::span<const std::optional<double>> ratios = {});

}  // namespace bbpl

#endif  // BBPL_EVAL_HPP
