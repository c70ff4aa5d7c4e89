#include "bbpl/tables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bbpl {

FlatTables::FlatTables(const GraphTopology& graph, double fill)
    : layout_(std::make_shared<const Layout>(graph)), values_(layout_->size(), fill) {}

FlatTables::FlatTables(const GraphTopology& graph, std::vector<double> values)
    : layout_(std::make_shared<const Layout>(graph)), values_(std::move(values)) {
  if (values_.size() != layout_->size()) {
    throw std::invalid_argument("flat vector has length " + std::to_string(values_.size()) +
                                ", layout expects " + std::to_string(layout_->size()));
  }
}

std::span<double> FlatTables::unary(Vertex s) {
  return std::span<double>(values_).subspan(layout_->unary_offset(s), layout_->unary_size(s));
}

std::span<const double> FlatTables::unary(Vertex s) const {
  return std::span<const double>(values_).subspan(layout_->unary_offset(s), layout_->unary_size(s));
}

std::span<double> FlatTables::pairwise(EdgeId e) {
  return std::span<double>(values_).subspan(layout_->pairwise_offset(e), layout_->pairwise_size(e));
}

std::span<const double> FlatTables::pairwise(EdgeId e) const {
  return std::span<const double>(values_).subspan(layout_->pairwise_offset(e),
                                                  layout_->pairwise_size(e));
}

double& FlatTables::operator()(EdgeId e, std::size_t xu, std::size_t xv) {
  return values_[layout_->pairwise_offset(e) + xu * layout_->pairwise_cols(e) + xv];
}

double FlatTables::operator()(EdgeId e, std::size_t xu, std::size_t xv) const {
  return values_[layout_->pairwise_offset(e) + xu * layout_->pairwise_cols(e) + xv];
}

std::vector<std::vector<double>> FlatTables::unary_tables() const {
  std::vector<std::vector<double>> out;
  for (Vertex s = 0; s < layout_->num_vertices(); ++s) {
    auto u = unary(s);
    out.emplace_back(u.begin(), u.end());
  }
  return out;
}

std::vector<std::vector<double>> FlatTables::pairwise_tables() const {
  std::vector<std::vector<double>> out;
  for (EdgeId e = 0; e < layout_->num_edges(); ++e) {
    auto p = pairwise(e);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

bool FlatTables::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void FlatTables::assign_tables(const std::vector<std::vector<double>>& unary_in,
                               const std::vector<std::vector<double>>& pairwise_in) {
  if (unary_in.size() != layout_->num_vertices() || pairwise_in.size() != layout_->num_edges()) {
    throw std::invalid_argument("table count does not match the graph");
  }
  for (Vertex s = 0; s < unary_in.size(); ++s) {
    if (unary_in[s].size() != layout_->unary_size(s)) {
      throw std::invalid_argument("unary table " + std::to_string(s) + " has wrong length");
    }
    std::copy(unary_in[s].begin(), unary_in[s].end(), unary(s).begin());
  }
  for (EdgeId e = 0; e < pairwise_in.size(); ++e) {
    if (pairwise_in[e].size() != layout_->pairwise_size(e)) {
      throw std::invalid_argument("pairwise table " + std::to_string(e) + " has wrong shape");
    }
    std::copy(pairwise_in[e].begin(), pairwise_in[e].end(), pairwise(e).begin());
  }
}

PotentialVector PotentialVector::from_tables(const GraphTopology& graph,
                                             const std::vector<std::vector<double>>& unary,
                                             const std::vector<std::vector<double>>& pairwise) {
  PotentialVector out(graph);
  out.assign_tables(unary, pairwise);
  return out;
}

BeliefVector BeliefVector::uniform(const GraphTopology& graph) {
  BeliefVector out(graph);
  for (Vertex s = 0; s < graph.num_vertices(); ++s) {
    auto u = out.unary(s);
    std::fill(u.begin(), u.end(), 1.0 / static_cast<double>(u.size()));
  }
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    auto p = out.pairwise(e);
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
  }
  return out;
}

BeliefVector BeliefVector::from_tables(const GraphTopology& graph,
                                       const std::vector<std::vector<double>>& unary,
                                       const std::vector<std::vector<double>>& pairwise) {
  BeliefVector out(graph);
  out.assign_tables(unary, pairwise);
  return out;
}

namespace {

double slice_violation(std::span<const double> slice) {
  double worst = 0.0;
  double sum = 0.0;
  for (double x : slice) {
    if (x < 0.0) worst = std::max(worst, -x);
    sum += x;
  }
  return std::max(worst, std::abs(sum - 1.0));
}

}  // namespace

double BeliefVector::simplex_violation() const {
  double worst = 0.0;
  for (Vertex s = 0; s < layout().num_vertices(); ++s) worst = std::max(worst, slice_violation(unary(s)));
  for (EdgeId e = 0; e < layout().num_edges(); ++e) worst = std::max(worst, slice_violation(pairwise(e)));
  return worst;
}

double consistency_violation(const GraphTopology& graph, const BeliefVector& tau) {
  double worst = 0.0;
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& ed = graph.edge(e);
    const std::size_t ku = graph.states(ed.u);
    const std::size_t kv = graph.states(ed.v);
    auto tu = tau.unary(ed.u);
    auto tv = tau.unary(ed.v);
    for (std::size_t a = 0; a < ku; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < kv; ++b) row += tau(e, a, b);
      worst = std::max(worst, std::abs(row - tu[a]));
    }
    for (std::size_t b = 0; b < kv; ++b) {
      double col = 0.0;
      for (std::size_t a = 0; a < ku; ++a) col += tau(e, a, b);
      worst = std::max(worst, std::abs(col - tv[b]));
    }
  }
  return worst;
}

MessageSet::MessageSet(const GraphTopology& graph, double fill)
    : layout_(std::make_shared<const Layout>(graph)), values_(layout_->message_size(), fill) {}

std::span<double> MessageSet::operator[](DirectedEdge d) {
  return std::span<double>(values_).subspan(layout_->message_offset(d.id()),
                                            layout_->message_length(d.id()));
}

std::span<const double> MessageSet::operator[](DirectedEdge d) const {
  return std::span<const double>(values_).subspan(layout_->message_offset(d.id()),
                                                  layout_->message_length(d.id()));
}

CountingNumbers::CountingNumbers(const GraphTopology& graph, std::vector<double> vertex,
                                 std::vector<double> edge)
    : vertex_(std::move(vertex)), edge_(std::move(edge)) {
  if (vertex_.size() != graph.num_vertices() || edge_.size() != graph.num_edges()) {
    throw std::invalid_argument("counting numbers do not match the graph");
  }
  for (double r : edge_) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("edge counting numbers must be finite and strictly positive");
    }
  }
  exponent_.resize(vertex_.size());
  for (Vertex s = 0; s < vertex_.size(); ++s) {
    if (!std::isfinite(vertex_[s])) throw std::invalid_argument("vertex counting number not finite");
    double total = vertex_[s];
    for (const auto& nb : graph.neighbors(s)) total += edge_[nb.edge];
    if (!(total > 0.0)) {
      throw std::invalid_argument("vertex " + std::to_string(s) +
                                  " has a non-positive belief exponent rho_s + sum rho_sv");
    }
    exponent_[s] = total;
  }
}

CountingNumbers CountingNumbers::uniform_convex(const GraphTopology& graph) {
  return CountingNumbers(graph, std::vector<double>(graph.num_vertices(), 1.0),
                         std::vector<double>(graph.num_edges(), 1.0));
}

CountingNumbers CountingNumbers::bethe(const GraphTopology& graph) {
  std::vector<double> vertex(graph.num_vertices());
  for (Vertex s = 0; s < vertex.size(); ++s) vertex[s] = 1.0 - static_cast<double>(graph.degree(s));
  return CountingNumbers(graph, std::move(vertex), std::vector<double>(graph.num_edges(), 1.0));
}

CountingNumbers CountingNumbers::preset(const std::string& name, const GraphTopology& graph) {
  if (name == "uniform-convex") return uniform_convex(graph);
  if (name == "bethe") return bethe(graph);
  throw std::invalid_argument("unknown counting-number preset '" + name + "'");
}

bool CountingNumbers::strictly_positive() const {
  return std::all_of(vertex_.begin(), vertex_.end(), [](double r) { return r > 0.0; }) &&
         std::all_of(edge_.begin(), edge_.end(), [](double r) { return r > 0.0; });
}

}  // namespace bbpl
