#include "bbpl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bbpl {

GraphTopology gen_grid(std::size_t rows, std::size_t cols, std::size_t k) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be at least 1");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Vertex v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  return GraphTopology(std::vector<std::size_t>(rows * cols, k), edges);
}

GraphTopology gen_ba(std::size_t n, std::size_t m, std::uint64_t seed, std::size_t k) {
  if (m < 1) throw std::invalid_argument("BA attachment count m must be at least 1");
  if (n <= m) throw std::invalid_argument("BA graph needs n > m");
  std::vector<std::pair<Vertex, Vertex>> edges;
  // Every edge contributes both endpoints, so a uniform pick from this list
  // is a degree-proportional pick of a vertex.
  std::vector<Vertex> ends;
  for (Vertex a = 0; a <= m; ++a) {
    for (Vertex b = a + 1; b <= m; ++b) {
      edges.emplace_back(a, b);
      ends.push_back(a);
      ends.push_back(b);
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<Vertex> targets;
  for (Vertex v = m + 1; v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
      const Vertex u = ends[pick(rng)];
      if (std::find(targets.begin(), targets.end(), u) == targets.end()) targets.push_back(u);
    }
    for (Vertex u : targets) {
      edges.emplace_back(u, v);
      ends.push_back(u);
      ends.push_back(v);
    }
  }
  return GraphTopology(std::vector<std::size_t>(n, k), edges);
}

PotentialVector gen_true_params(const GraphTopology& graph, double scale, std::uint64_t seed) {
  if (!(scale > 0.0)) throw std::invalid_argument("param scale must be positive");
  PotentialVector theta(graph, 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (double& x : theta.flat()) x = normal(rng);
  return theta;
}

MrfDataset gibbs_sample(const GraphTopology& graph, const PotentialVector& theta,
                        std::size_t n_samples, const GibbsConfig& cfg, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  if (cfg.thin < 1) throw std::invalid_argument("thin must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = graph.num_vertices();
  Assignment x(n);
  for (Vertex s = 0; s < n; ++s) {
    std::uniform_int_distribution<std::size_t> pick(0, graph.states(s) - 1);
    x[s] = pick(rng);
  }
  std::vector<double> logits;
  auto sweep = [&] {
    for (Vertex s = 0; s < n; ++s) {
      auto th = theta.unary(s);
      logits.assign(th.begin(), th.end());
      for (const auto& nb : graph.neighbors(s)) {
        const bool s_is_u = graph.edge(nb.edge).u == s;
        for (std::size_t a = 0; a < logits.size(); ++a) {
          logits[a] += s_is_u ? theta(nb.edge, a, x[nb.vertex]) : theta(nb.edge, x[nb.vertex], a);
        }
      }
      const double top = *std::max_element(logits.begin(), logits.end());
      double total = 0.0;
      for (double& l : logits) total += (l = std::exp(l - top));
      double r = unit(rng) * total;
      std::size_t a = 0;
      while (a + 1 < logits.size() && r >= logits[a]) r -= logits[a++];
      x[s] = a;
    }
  };
  for (std::size_t i = 0; i < cfg.burn_in; ++i) sweep();
  MrfDataset out;
  out.samples.reserve(n_samples);
  while (out.samples.size() < n_samples) {
    for (std::size_t i = 0; i < cfg.thin; ++i) sweep();
    out.samples.push_back(x);
  }
  return out;
}

}  // namespace bbpl
