#ifndef BBPL_TABLES_HPP
#define BBPL_TABLES_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bbpl/graph.hpp"

namespace bbpl {

/// Unary and pairwise tables stored contiguously in the flat Layout order.
///
/// The layout is shared and immutable, so copies are cheap value copies of
/// the underlying numbers.
class FlatTables {
 public:
  FlatTables() = default;
  explicit FlatTables(const GraphTopology& graph, double fill = 0.0);
  FlatTables(const GraphTopology& graph, std::vector<double> values);

  std::span<double> unary(Vertex s);
  std::span<const double> unary(Vertex s) const;
  std::span<double> pairwise(EdgeId e);
  std::span<const double> pairwise(EdgeId e) const;
  double& operator()(EdgeId e, std::size_t xu, std::size_t xv);
  double operator()(EdgeId e, std::size_t xu, std::size_t xv) const;

  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const Layout& layout() const { return *layout_; }

  /// Nested form: one vector per vertex, then one row-major vector per edge.
  std::vector<std::vector<double>> unary_tables() const;
  std::vector<std::vector<double>> pairwise_tables() const;

  bool all_finite() const;

 protected:
  void assign_tables(const std::vector<std::vector<double>>& unary,
                     const std::vector<std::vector<double>>& pairwise);

 private:
  std::shared_ptr<const Layout> layout_ = std::make_shared<const Layout>();
  std::vector<double> values_;
};

/// Log-potentials theta.
class PotentialVector : public FlatTables {
 public:
  using FlatTables::FlatTables;

  static PotentialVector from_tables(const GraphTopology& graph,
                                     const std::vector<std::vector<double>>& unary,
                                     const std::vector<std::vector<double>>& pairwise);

  friend bool operator==(const PotentialVector& a, const PotentialVector& b) {
    return a.values() == b.values();
  }
};

/// Pseudo-marginals tau.
class BeliefVector : public FlatTables {
 public:
  using FlatTables::FlatTables;

  /// Uniform unary and pairwise tables (a point of the local polytope).
  static BeliefVector uniform(const GraphTopology& graph);
  static BeliefVector from_tables(const GraphTopology& graph,
                                  const std::vector<std::vector<double>>& unary,
                                  const std::vector<std::vector<double>>& pairwise);

  /// Largest violation of the simplex constraints (negativity or sum != 1).
  double simplex_violation() const;
  friend bool operator==(const BeliefVector& a, const BeliefVector& b) {
    return a.values() == b.values();
  }
};

/// Directed messages lambda_{uv}, one table of length k_v per DirectedEdge.
class MessageSet {
 public:
  MessageSet() = default;
  explicit MessageSet(const GraphTopology& graph, double fill = 0.0);

  std::span<double> operator[](DirectedEdge d);
  std::span<const double> operator[](DirectedEdge d) const;

  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const Layout& layout() const { return *layout_; }

  friend bool operator==(const MessageSet& a, const MessageSet& b) {
    return a.values_ == b.values_;
  }

 private:
  std::shared_ptr<const Layout> layout_ = std::make_shared<const Layout>();
  std::vector<double> values_;
};

/// Entropy weights of the convex free energy
///   sum_s rho_s H(tau_s) + sum_uv rho_uv H(tau_uv).
///
/// The message updates divide the unary exponent by
///   belief_exponent(s) = rho_s + sum_{v in N(s)} rho_sv,
/// which is what makes their fixed point the maximizer of that free energy.
class CountingNumbers {
 public:
  CountingNumbers() = default;
  CountingNumbers(const GraphTopology& graph, std::vector<double> vertex,
                  std::vector<double> edge);

  /// rho_s = 1, rho_uv = 1. Strictly concave entropy; B(theta) >= A(theta).
  static CountingNumbers uniform_convex(const GraphTopology& graph);
  /// rho_uv = 1, rho_s = 1 - deg(s). Exact on trees; not convex on loopy graphs.
  static CountingNumbers bethe(const GraphTopology& graph);
  /// Preset by name: "uniform-convex" or "bethe".
  static CountingNumbers preset(const std::string& name, const GraphTopology& graph);

  double vertex(Vertex s) const { return vertex_[s]; }
  double edge(EdgeId e) const { return edge_[e]; }
  double belief_exponent(Vertex s) const { return exponent_[s]; }
  const std::vector<double>& vertex_weights() const { return vertex_; }
  const std::vector<double>& edge_weights() const { return edge_; }

  /// True when every rho_s and rho_uv is strictly positive.
  bool strictly_positive() const;

 private:
  std::vector<double> vertex_;
  std::vector<double> edge_;
  std::vector<double> exponent_;
};

/// Largest |sum_{x_v} tau_uv(x_u, x_v) - tau_u(x_u)| over both endpoints of
/// every edge: zero exactly on the local marginal polytope.
double consistency_violation(const GraphTopology& graph, const BeliefVector& tau);

}  // namespace bbpl

#endif  // BBPL_TABLES_HPP
