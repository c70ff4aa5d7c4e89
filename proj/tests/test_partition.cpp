#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "bbpl/partition.hpp"
#include "bbpl/synth.hpp"
#include "helpers.hpp"

using namespace bbpl;

TEST_CASE("split_sizes puts the remainder first") {
  CHECK(split_sizes(6, 2) == std::vector<std::size_t>{3, 3});
  CHECK(split_sizes(7, 3) == std::vector<std::size_t>{3, 2, 2});
  CHECK(split_sizes(5, 5) == std::vector<std::size_t>{1, 1, 1, 1, 1});
  CHECK_THROWS_AS(split_sizes(5, 0), std::invalid_argument);
}

TEST_CASE("6x6 grid into 2x2 tiles") {
  const auto g = gen_grid(6, 6, 2);
  const auto part = grid_partition(g, 6, 6, 2, 2);
  REQUIRE(part.size() == 4);
  CHECK(validate(part, g).empty());
  CHECK(part[0].vertices == std::vector<Vertex>{0, 1, 2, 6, 7, 8, 12, 13, 14});
  for (const auto& b : part.blocks) {
    CHECK(b.vertices.size() == 9);
    // 12 interior edges plus 3 + 3 boundary edges.
    CHECK(b.edges.size() == 18);
    CHECK(b.sweep.size() == 36);
  }
  std::size_t boundary = 0;
  std::vector<int> seen(g.num_edges(), 0);
  for (const auto& b : part.blocks) {
    for (EdgeId e : b.edges) ++seen[e];
  }
  for (int c : seen) {
    CHECK((c == 1 || c == 2));
    boundary += c == 2;
  }
  CHECK(boundary == 12);
}

TEST_CASE("uneven grid tiles") {
  const auto g = gen_grid(5, 7, 2);
  const auto part = grid_partition(g, 5, 7, 2, 3);
  CHECK(validate(part, g).empty());
  CHECK(part[0].vertices.size() == 3 * 3);
  CHECK(part[5].vertices.size() == 2 * 2);
  CHECK_THROWS_AS(grid_partition(g, 5, 7, 6, 1), std::invalid_argument);
  CHECK_THROWS_AS(grid_partition(g, 5, 7, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(grid_partition(g, 5, 6, 1, 1), std::invalid_argument);
}

TEST_CASE("index partition") {
  const auto g = gen_grid(1, 10, 2);
  const auto part = index_partition(g, 3);
  CHECK(validate(part, g).empty());
  CHECK(part[0].vertices == std::vector<Vertex>{0, 1, 2, 3});
  CHECK(part[2].vertices == std::vector<Vertex>{7, 8, 9});
  // Chain: the block {0..3} owns edges 0-1, 1-2, 2-3 and the boundary 3-4.
  CHECK(part[0].edges.size() == 4);
  CHECK_THROWS_AS(index_partition(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(index_partition(g, 11), std::invalid_argument);
  const auto one = index_partition(g, 1);
  CHECK(one[0].vertices.size() == 10);
  CHECK(one[0].edges.size() == g.num_edges());
}

TEST_CASE("sweep order and sender flags") {
  const auto g = gen_grid(1, 3, 2);
  const auto b = make_block(g, {0});
  REQUIRE(b.edges == std::vector<EdgeId>{0});
  REQUIRE(b.sweep.size() == 2);
  CHECK(b.sweep[0].edge == DirectedEdge{0, false});
  CHECK(b.sweep[0].sender_in_block);
  CHECK(b.sweep[1].edge == DirectedEdge{0, true});
  CHECK_FALSE(b.sweep[1].sender_in_block);
  CHECK_THROWS_AS(make_block(g, {3}), std::out_of_range);
}

TEST_CASE("validate reports broken partitions") {
  const auto g = gen_grid(3, 3, 2);
  auto overlap = partition_from_vertex_sets(g, {{0, 1, 2, 3, 4}, {4, 5, 6, 7, 8}});
  CHECK_FALSE(validate(overlap, g).empty());
  auto missing = partition_from_vertex_sets(g, {{0, 1, 2}, {3, 4, 5}});
  const auto problems = validate(missing, g);
  CHECK(std::any_of(problems.begin(), problems.end(),
                    [](const std::string& p) { return p.find("not covered") != std::string::npos; }));
  auto tampered = grid_partition(g, 3, 3, 1, 3);
  tampered.blocks[0].edges.pop_back();
  CHECK_FALSE(validate(tampered, g).empty());
  tampered = grid_partition(g, 3, 3, 1, 3);
  std::swap(tampered.blocks[1].sweep[0], tampered.blocks[1].sweep[1]);
  CHECK_FALSE(validate(tampered, g).empty());
  CHECK_FALSE(validate(BlockPartition{}, g).empty());
}

TEST_CASE("scatter maps") {
  const auto g = gen_grid(2, 2, 2);
  const auto part = index_partition(g, 2);
  const Layout layout(g);
  std::vector<double> full(layout.size(), 0.0);
  const auto& b = part[0];
  std::vector<double> sub(b.belief_indices.size(), 1.0);
  const auto updated = scatter_update(full, b, sub);
  std::set<std::size_t> idx(b.belief_indices.begin(), b.belief_indices.end());
  for (std::size_t j = 0; j < updated.size(); ++j) CHECK(updated[j] == (idx.count(j) ? 1.0 : 0.0));
  CHECK(gather(updated, b.belief_indices) == sub);
  CHECK_THROWS_AS(scatter_update(full, b, std::vector<double>(1)), std::invalid_argument);
}

TEST_CASE("property: random vertex partitions satisfy the invariants") {
  std::mt19937 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = testing::random_loopy(rng, 12, 2, 0.2);
    std::uniform_int_distribution<std::size_t> nblocks(1, 5);
    const std::size_t d = nblocks(rng);
    std::vector<std::vector<Vertex>> sets(d);
    std::vector<Vertex> order(g.num_vertices());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) sets[i % d].push_back(order[i]);
    const auto part = partition_from_vertex_sets(g, sets);
    CHECK(validate(part, g).empty());
    std::size_t owned = 0;
    for (const auto& b : part.blocks) {
      for (EdgeId e : b.edges) {
        const auto& ed = g.edge(e);
        CHECK((std::binary_search(b.vertices.begin(), b.vertices.end(), ed.u) ||
               std::binary_search(b.vertices.begin(), b.vertices.end(), ed.v)));
      }
      owned += b.vertices.size();
    }
    CHECK(owned == g.num_vertices());
  }
}
