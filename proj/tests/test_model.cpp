#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bbpl/errors.hpp"
#include "bbpl/exact.hpp"
#include "bbpl/model.hpp"
#include "bbpl/synth.hpp"
#include "helpers.hpp"

using namespace bbpl;

namespace {

GraphTopology pair_graph() { return GraphTopology({2, 2}, {{0, 1}}); }

}  // namespace

TEST_CASE("graph canonicalizes and rejects bad edges") {
  GraphTopology g({2, 3, 2}, {{2, 1}, {1, 0}});
  CHECK(g.num_edges() == 2);
  CHECK(g.edge(0) == Edge{0, 1});
  CHECK(g.edge(1) == Edge{1, 2});
  CHECK(g.degree(1) == 2);
  CHECK(g.find_edge(2, 1) == std::optional<EdgeId>(1));
  CHECK_FALSE(g.find_edge(0, 2).has_value());
  CHECK(g.check().empty());
  CHECK_THROWS_AS(GraphTopology({2, 2}, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(GraphTopology({2, 2}, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(GraphTopology({2, 2}, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(GraphTopology({2, 1}, {}), std::invalid_argument);
}

TEST_CASE("flatten_index sizes") {
  CHECK(flatten_index(pair_graph()).size() == 8);
  CHECK(flatten_index(GraphTopology({4}, {})).size() == 4);
  CHECK(flatten_index(GraphTopology({3, 3, 3}, {{0, 1}, {1, 2}})).size() == 27);

  const Layout l(GraphTopology({2, 3}, {{0, 1}}));
  CHECK(l.unary_offset(1) == 2);
  CHECK(l.pairwise_offset(0) == 5);
  CHECK(l.pairwise_rows(0) == 2);
  CHECK(l.pairwise_cols(0) == 3);
  CHECK(l.message_length(DirectedEdge{0, false}.id()) == 3);
  CHECK(l.message_length(DirectedEdge{0, true}.id()) == 2);
}

TEST_CASE("layout round trip structured -> flat -> structured") {
  std::mt19937 rng(3);
  const auto g = testing::random_loopy(rng, 5, 3, 0.4);
  const auto theta = testing::random_theta(rng, g);
  const auto back = PotentialVector::from_tables(g, theta.unary_tables(), theta.pairwise_tables());
  CHECK(back == theta);
}

TEST_CASE("exact_log_partition examples") {
  CHECK(exact_log_partition(GraphTopology({4}, {}), PotentialVector(GraphTopology({4}, {}))) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-15));
  const auto g = pair_graph();
  CHECK(exact_log_partition(g, PotentialVector(g)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  PotentialVector theta(g);
  theta(0, 0, 0) = 1.0;
  theta(0, 1, 1) = 1.0;
  CHECK(exact_log_partition(g, theta) == doctest::Approx(std::log(2 * std::exp(1.0) + 2)).epsilon(1e-14));
  CHECK(exact_log_partition(g, theta) == doctest::Approx(2.0064).epsilon(1e-4));
}

TEST_CASE("exact_marginals examples") {
  GraphTopology single({2}, {});
  PotentialVector th(single);
  th.unary(0)[1] = std::log(3.0);
  const auto tau = exact_marginals(single, th);
  CHECK(tau.unary(0)[0] == doctest::Approx(0.25));
  CHECK(tau.unary(0)[1] == doctest::Approx(0.75));

  const auto g = pair_graph();
  PotentialVector theta(g);
  theta(0, 0, 0) = 1.0;
  theta(0, 1, 1) = 1.0;
  const auto m = exact_marginals(g, theta);
  const double e = std::exp(1.0);
  CHECK(m(0, 0, 0) == doctest::Approx(e / (2 * e + 2)));
  CHECK(m(0, 1, 1) == doctest::Approx(e / (2 * e + 2)));
  CHECK(m(0, 0, 1) == doctest::Approx(1 / (2 * e + 2)));

  std::mt19937 rng(1);
  const auto lg = testing::random_loopy(rng, 5, 3, 0.5);
  const auto uniform = exact_marginals(lg, PotentialVector(lg));
  for (Vertex s = 0; s < lg.num_vertices(); ++s) {
    for (double p : uniform.unary(s)) CHECK(p == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("exact marginals lie in the local polytope") {
  std::mt19937 rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    const auto g = testing::random_loopy(rng, 6, 3, 0.4);
    const auto tau = exact_marginals(g, testing::random_theta(rng, g));
    CHECK(consistency_violation(g, tau) <= 1e-12);
    CHECK(tau.simplex_violation() <= 1e-12);
  }
}

TEST_CASE("exact_log_partition invariant under edge reordering") {
  std::mt19937 rng(5);
  std::vector<std::pair<Vertex, Vertex>> edges{{0, 1}, {1, 2}, {2, 3}, {0, 3}, {1, 3}};
  const GraphTopology a({2, 3, 2, 3}, edges);
  std::reverse(edges.begin(), edges.end());
  for (auto& e : edges) std::swap(e.first, e.second);
  const GraphTopology b({2, 3, 2, 3}, edges);
  const auto theta = testing::random_theta(rng, a);
  const PotentialVector theta_b(b, theta.values());
  CHECK(std::abs(exact_log_partition(a, theta) - exact_log_partition(b, theta_b)) <= 1e-9);
}

TEST_CASE("enumeration guard") {
  const auto g = gen_grid(5, 5, 2);
  CHECK_THROWS_AS(exact_log_partition(g, PotentialVector(g)), StateSpaceTooLarge);
  CHECK_THROWS_AS(exact_marginals(g, PotentialVector(g)), StateSpaceTooLarge);
}

TEST_CASE("banded sweep agrees with enumeration") {
  std::mt19937 rng(21);
  for (int rep = 0; rep < 6; ++rep) {
    const auto g = rep % 2 ? gen_grid(3, 4, 2) : testing::random_loopy(rng, 7, 3, 0.3);
    const auto theta = testing::random_theta(rng, g);
    CHECK(banded_log_partition(g, theta) == doctest::Approx(exact_log_partition(g, theta)).epsilon(1e-12));
    const auto a = banded_marginals(g, theta);
    const auto b = exact_marginals(g, theta);
    CHECK(testing::max_diff(a.flat(), b.flat()) <= 1e-12);
  }
  GraphTopology single({3}, {});
  CHECK(banded_log_partition(single, PotentialVector(single)) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("empirical_statistics examples") {
  GraphTopology single({2}, {});
  const auto w = empirical_statistics(MrfDataset{{{0}, {1}}}, single);
  CHECK(w == std::vector<double>{0.5, 0.5});

  const auto g = pair_graph();
  CHECK(empirical_statistics(MrfDataset{{{1, 0}}}, g) == sufficient_statistics(g, {1, 0}));
  const auto w2 = empirical_statistics(MrfDataset{{{0, 0}, {0, 1}}}, g);
  CHECK(w2 == std::vector<double>{1, 0, 0.5, 0.5, 0.5, 0.5, 0, 0});

  CHECK_THROWS_AS(empirical_statistics(MrfDataset{}, g), std::invalid_argument);
  CHECK_THROWS_AS(empirical_statistics(MrfDataset{{{0, 2}}}, g), std::out_of_range);
}

TEST_CASE("empirical statistics lie in the local polytope") {
  std::mt19937 rng(4);
  const auto g = testing::random_loopy(rng, 6, 3, 0.4);
  MrfDataset data;
  std::uniform_int_distribution<std::size_t> state(0, 2);
  for (int i = 0; i < 17; ++i) {
    Assignment x(6);
    for (auto& v : x) v = state(rng);
    data.samples.push_back(x);
  }
  const BeliefVector w(g, empirical_statistics(data, g));
  CHECK(consistency_violation(g, w) <= 1e-12);
  CHECK(w.simplex_violation() <= 1e-12);
}

TEST_CASE("ground_potentials examples") {
  const auto g = pair_graph();
  const auto y = sufficient_statistics(g, {0, 1});
  const auto id = FeatureModel::identity(y);
  std::vector<double> shared(8);
  std::iota(shared.begin(), shared.end(), 1.0);
  CHECK(ground_potentials(shared, id, g).values() == shared);
  CHECK(ground_potentials(std::vector<double>(8, 0.0), id, g).values() == std::vector<double>(8, 0.0));

  FeatureModel ones{1, 8, std::vector<double>(8, 1.0), y};
  CHECK(ground_potentials(std::vector<double>{2.0}, ones, g).values() == std::vector<double>(8, 2.0));
  CHECK_THROWS_AS(ground_potentials(std::vector<double>{1.0, 2.0}, ones, g), std::invalid_argument);

  std::vector<double> partial(8, -1.0);
  const std::vector<std::size_t> idx{1, 6};
  ground_potentials_at(shared, id, idx, partial);
  CHECK(partial == std::vector<double>{-1, 2, -1, -1, -1, -1, 7, -1});
}

TEST_CASE("FeatureModel invariants") {
  const auto g = pair_graph();
  auto fm = FeatureModel::identity(sufficient_statistics(g, {1, 0}));
  CHECK(fm.check(g).empty());
  auto bad = fm;
  bad.labels[6] = 0.0;
  bad.labels[7] = 1.0;
  CHECK_FALSE(bad.check(g).empty());
  bad = fm;
  bad.labels[0] = 0.5;
  CHECK_FALSE(bad.check(g).empty());
  bad = fm;
  bad.matrix[3] = std::nan("");
  CHECK_FALSE(bad.check(g).empty());
  CrfDataset data{{CrfInstance{g, fm}}};
  CHECK(empirical_statistics(data) == fm.labels);
}
