#include "bbpl/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bbpl/errors.hpp"
#include "bbpl/model.hpp"
#include "bbpl/numeric.hpp"

namespace bbpl {

namespace {

std::size_t joint_size_or_throw(const GraphTopology& graph) {
  double total = 1.0;
  for (std::size_t k : graph.state_counts()) {
    total *= static_cast<double>(k);
    if (total > kEnumerationLimit) {
      throw StateSpaceTooLarge("joint state space exceeds " + std::to_string(kEnumerationLimit) +
                               " states");
    }
  }
  return static_cast<std::size_t>(total);
}

double score(const GraphTopology& graph, const PotentialVector& theta, const Assignment& x) {
  double s = 0.0;
  for (Vertex v = 0; v < graph.num_vertices(); ++v) s += theta.unary(v)[x[v]];
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& ed = graph.edge(e);
    s += theta(e, x[ed.u], x[ed.v]);
  }
  return s;
}

// Odometer over the joint state space, vertex 0 fastest.
bool advance(const GraphTopology& graph, Assignment& x) {
  for (Vertex v = 0; v < x.size(); ++v) {
    if (++x[v] < graph.states(v)) return true;
    x[v] = 0;
  }
  return false;
}

}  // namespace

double exact_log_partition(const GraphTopology& graph, const PotentialVector& theta) {
  joint_size_or_throw(graph);
  Assignment x(graph.num_vertices(), 0);
  LogSumExp acc;
  do {
    acc.add(score(graph, theta, x));
  } while (advance(graph, x));
  return acc.value();
}

BeliefVector exact_marginals(const GraphTopology& graph, const PotentialVector& theta) {
  const double log_z = exact_log_partition(graph, theta);
  BeliefVector tau(graph);
  Assignment x(graph.num_vertices(), 0);
  do {
    const double p = std::exp(score(graph, theta, x) - log_z);
    for (Vertex v = 0; v < graph.num_vertices(); ++v) tau.unary(v)[x[v]] += p;
    for (EdgeId e = 0; e < graph.num_edges(); ++e) {
      const auto& ed = graph.edge(e);
      tau(e, x[ed.u], x[ed.v]) += p;
    }
  } while (advance(graph, x));
  return tau;
}

std::size_t bandwidth(const GraphTopology& graph) {
  std::size_t b = 0;
  for (const auto& ed : graph.edges()) b = std::max(b, ed.v - ed.u);
  return b;
}

namespace {

// Forward-backward over vertices in index order. At step i the extended
// window X holds vertices [lo(i), i] with lo(i) = max(0, i - b); the index of
// X is mixed-radix with vertex i least significant. The carried window after
// step i drops vertex i - b when it exists.
class BandedSweep {
 public:
  BandedSweep(const GraphTopology& graph, const PotentialVector& theta)
      : graph_(graph), theta_(theta), n_(graph.num_vertices()) {
    b_ = std::max<std::size_t>(1, bandwidth(graph));
    lower_edges_.resize(n_);
    for (EdgeId e = 0; e < graph.num_edges(); ++e) lower_edges_[graph.edge(e).v].push_back(e);
    for (Vertex i = 0; i < n_; ++i) {
      if (static_cast<double>(extended_size(i)) > kEnumerationLimit) {
        throw StateSpaceTooLarge("banded window exceeds " + std::to_string(kEnumerationLimit) +
                                 " states");
      }
    }
  }

  void run() {
    forward_.assign(n_, {});
    backward_.assign(n_, {});
    std::vector<double> prev{0.0};
    for (Vertex i = 0; i < n_; ++i) {
      const auto scores = step_scores(i);
      const std::size_t carried = carried_size(i);
      std::vector<LogSumExp> acc(carried);
      for (std::size_t xi = 0; xi < scores.size(); ++xi) {
        acc[xi % carried].add(prev[xi / graph_.states(i)] + scores[xi]);
      }
      forward_[i].resize(carried);
      for (std::size_t w = 0; w < carried; ++w) forward_[i][w] = acc[w].value();
      prev = forward_[i];
    }
    backward_[n_ - 1].assign(carried_size(n_ - 1), 0.0);
    for (Vertex i = n_ - 1; i > 0; --i) {
      const auto scores = step_scores(i);
      const std::size_t carried = carried_size(i);
      const std::size_t before = carried_size(i - 1);
      std::vector<LogSumExp> acc(before);
      for (std::size_t xi = 0; xi < scores.size(); ++xi) {
        acc[xi / graph_.states(i)].add(scores[xi] + backward_[i][xi % carried]);
      }
      backward_[i - 1].resize(before);
      for (std::size_t p = 0; p < before; ++p) backward_[i - 1][p] = acc[p].value();
    }
    LogSumExp z;
    for (double f : forward_[n_ - 1]) z.add(f);
    log_z_ = z.value();
  }

  double log_z() const { return log_z_; }

  BeliefVector marginals() const {
    BeliefVector tau(graph_);
    for (Vertex i = 0; i < n_; ++i) {
      const auto scores = step_scores(i);
      const std::size_t carried = carried_size(i);
      const std::size_t ki = graph_.states(i);
      for (std::size_t xi = 0; xi < scores.size(); ++xi) {
        const double before = i == 0 ? 0.0 : forward_[i - 1][xi / ki];
        const double p = std::exp(before + scores[xi] + backward_[i][xi % carried] - log_z_);
        tau.unary(i)[xi % ki] += p;
        for (EdgeId e : lower_edges_[i]) {
          const Vertex u = graph_.edge(e).u;
          tau(e, digit(i, xi, u), xi % ki) += p;
        }
      }
    }
    return tau;
  }

 private:
  Vertex lo(Vertex i) const { return i >= b_ ? i - b_ : 0; }

  std::size_t extended_size(Vertex i) const {
    std::size_t s = 1;
    for (Vertex v = lo(i); v <= i; ++v) s *= graph_.states(v);
    return s;
  }

  std::size_t carried_size(Vertex i) const {
    std::size_t s = extended_size(i);
    if (i >= b_) s /= graph_.states(i - b_);
    return s;
  }

  // State of vertex u inside extended window index xi of step i.
  std::size_t digit(Vertex i, std::size_t xi, Vertex u) const {
    std::size_t stride = 1;
    for (Vertex v = i; v > u; --v) stride *= graph_.states(v);
    return (xi / stride) % graph_.states(u);
  }

  std::vector<double> step_scores(Vertex i) const {
    const std::size_t size = extended_size(i);
    const std::size_t ki = graph_.states(i);
    std::vector<double> out(size);
    auto th = theta_.unary(i);
    for (std::size_t xi = 0; xi < size; ++xi) {
      const std::size_t xv = xi % ki;
      double s = th[xv];
      for (EdgeId e : lower_edges_[i]) s += theta_(e, digit(i, xi, graph_.edge(e).u), xv);
      out[xi] = s;
    }
    return out;
  }

  const GraphTopology& graph_;
  const PotentialVector& theta_;
  std::size_t n_;
  std::size_t b_ = 1;
  std::vector<std::vector<EdgeId>> lower_edges_;
  std::vector<std::vector<double>> forward_;
  std::vector<std::vector<double>> backward_;
  double log_z_ = 0.0;
};

}  // namespace

double banded_log_partition(const GraphTopology& graph, const PotentialVector& theta) {
  if (graph.num_vertices() == 0) return 0.0;
  BandedSweep sweep(graph, theta);
  sweep.run();
  return sweep.log_z();
}

BeliefVector banded_marginals(const GraphTopology& graph, const PotentialVector& theta) {
  if (graph.num_vertices() == 0) return BeliefVector(graph);
  BandedSweep sweep(graph, theta);
  sweep.run();
  return sweep.marginals();
}

}  // namespace bbpl
