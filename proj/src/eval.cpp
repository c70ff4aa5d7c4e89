#include "bbpl/eval.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace bbpl {

double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("l2_distance: length mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

double l2_norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

std::vector<double> distance_trace(const LearningTrace& trace, std::span<const double> theta_ref) {
  if (trace.snapshots.empty()) throw std::invalid_argument("trace has no theta snapshots");
  std::vector<double> out;
  out.reserve(trace.snapshots.size());
  for (const auto& snap : trace.snapshots) out.push_back(l2_distance(snap, theta_ref));
  return out;
}

void LyapunovConfig::validate() const {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("contraction constant c must be in (0, 1)");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(eta >= beta)) throw std::invalid_argument("need beta <= eta");
}

LyapunovParams lyapunov_params(const LyapunovConfig& cfg) {
  cfg.validate();
  const double b = cfg.beta;
  const double h = cfg.eta;
  LyapunovParams p;
  p.gamma = b / (2.0 * (1.0 - cfg.c) * h * h);
  if (!std::isfinite(p.gamma)) throw std::domain_error("gamma overflows as c approaches 1");
  p.alpha_max = std::min(cfg.c * b / (2.0 * h * h + h * b + b * b), 2.0 / (h + b));
  return p;
}

double ContractionRun::fraction_below_one() const {
  std::size_t below = 0;
  for (const auto& r : ratios) {
    if (r && *r < 1.0) ++below;
  }
  const std::size_t n = defined();
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(below) / n;
}

std::size_t ContractionRun::defined() const {
  std::size_t n = 0;
  for (const auto& r : ratios) n += r.has_value();
  return n;
}

ContractionRun contraction_ratios(const GraphTopology& graph, std::span<const double> w_bar,
                                  const CountingNumbers& rho, const BlockPartition& partition,
                                  const LearnConfig& cfg, const BbplObserver& also) {
  ContractionRun run;
  std::optional<BPState> reference;
  auto probe = [&](const BbplProbe& p) {
    const PotentialVector theta(graph, std::vector<double>(p.theta.begin(), p.theta.end()));
    reference = run_bp(graph, theta, rho, cfg.bp, reference);
    const auto& star = reference->beliefs.flat();
    const double den = l2_distance(p.tau_before.flat(), star);
    if (den < 1e-12) {
      run.ratios.push_back(std::nullopt);
    } else {
      run.ratios.push_back(l2_distance(p.state.beliefs.flat(), star) / den);
    }
    if (also) also(p);
  };
  run.trace = train_bbpl(graph, w_bar, rho, partition, cfg, probe);
  return run;
}

std::vector<WorkRow> work_report(const std::vector<LearningTrace>& traces) {
  std::vector<WorkRow> rows;
  for (const auto& tr : traces) {
    WorkRow row;
    row.method = tr.method;
    row.outer_iters = tr.iterations.size();
    row.converged = tr.converged;
    if (!tr.iterations.empty()) {
      const auto& last = tr.iterations.back();
      row.msg_updates = last.msg_updates_cum;
      row.wall_ms = last.wall_ms;
      row.final_objective = last.objective;
      row.final_grad = last.grad_inf_norm;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_work_report_csv(std::ostream& os, const std::vector<WorkRow>& rows) {
  os << "method,outer_iters,msg_updates,wall_ms,final_objective,final_grad_inf_norm,converged\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.method << ',' << r.outer_iters << ',' << r.msg_updates << ',' << r.wall_ms << ','
       << r.final_objective << ',' << r.final_grad << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_trace_csv(std::ostream& os, const LearningTrace& trace,
                     std::span<const double> distances,
                     std::span<const std::optional<double>> ratios) {
  os << "t,method,objective,grad_inf_norm,msg_updates_cum,wall_ms,dist_to_opt,block_id,"
        "contraction_ratio\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& r = trace.iterations[i];
    os << r.t << ',' << trace.method << ',' << r.objective << ',' << r.grad_inf_norm << ','
       << r.msg_updates_cum << ',' << r.wall_ms << ',';
    if (i < distances.size()) os << distances[i];
    os << ',';
    if (r.block_id >= 0) os << r.block_id;
    os << ',';
    if (i < ratios.size() && ratios[i]) os << *ratios[i];
    os << '\n';
  }
}

}  // namespace bbpl
