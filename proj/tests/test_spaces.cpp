#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "abm/space/continuous.hpp"
#include "abm/space/graph.hpp"
#include "abm/space/grid.hpp"
#include "ring_space.hpp"
#include "space_conformance.hpp"

using namespace abm;

namespace {

template <class Space>
std::set<typename Space::Position> as_set(const std::vector<typename Space::Position>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("conformance: grid spaces") {
  for (bool periodic : {false, true})
    for (Metric metric : {Metric::chebyshev, Metric::euclidean}) {
      CAPTURE(periodic);
      const std::array<int, 2> dims{9, 4};
      const auto failure = conformance::run(GridSpace<2>(dims, periodic, metric), conformance::grid_within<2>(dims, periodic, metric),
                                            {300, 3, {0, 1, 1.5, 2, 3.7, 6}, 7});
      CHECK_MESSAGE(!failure, failure.value_or(""));
      const std::array<int, 3> dims3{4, 3, 5};
      const auto failure3 = conformance::run(GridSpace<3>(dims3, periodic, metric),
                                             conformance::grid_within<3>(dims3, periodic, metric), {300, 3, {0, 1, 1.8, 2.5}, 8});
      CHECK_MESSAGE(!failure3, failure3.value_or(""));
    }
}

TEST_CASE("conformance: continuous spaces") {
  for (bool periodic : {false, true}) {
    const Eigen::Vector2d extent(10, 6);
    const auto f2 = conformance::run(ContinuousSpace<2>(extent, periodic, 0.7), conformance::continuous_within<2>(extent, periodic),
                                     {300, 3, {0, 0.5, 1.3, 2.9, 5, 20}, 9});
    CHECK_MESSAGE(!f2, f2.value_or(""));
    const Eigen::Vector3d extent3(4, 5, 3);
    const auto f3 = conformance::run(ContinuousSpace<3>(extent3, periodic), conformance::continuous_within<3>(extent3, periodic),
                                     {300, 3, {0.2, 1, 2.2}, 10});
    CHECK_MESSAGE(!f3, f3.value_or(""));
  }
}

TEST_CASE("conformance: graph space") {
  const GraphSpace g = conformance::random_graph(25, 0.08, 3);
  const auto d = conformance::hops(g);
  const auto within = [&](NodeId a, NodeId q, double r) { return d[std::size_t(q)][std::size_t(a)] <= std::floor(r); };
  const auto failure = conformance::run(g, within, {300, 3, {0, 1, 2, 3.5}, 11});
  CHECK_MESSAGE(!failure, failure.value_or(""));
}

TEST_CASE("conformance: a ring space defined in the tests") {
  for (int n : {1, 2, 7, 10}) {
    const RingSpace ring(n);
    const auto within = [&](int a, int q, double r) { return ring.distance(a, q) <= std::floor(r); };
    const auto failure = conformance::run(ring, within, {200, 3, {0, 1, 2, 4, 9}, std::uint64_t(n)});
    CHECK_MESSAGE(!failure, failure.value_or(""));
  }
}

TEST_CASE("continuous neighbor sets equal brute force") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto failure = conformance::continuous_trial(seed);
    REQUIRE_MESSAGE(!failure, failure.value_or(""));
  }
}

TEST_CASE("grid neighborhoods") {
  const GridSpace<2> cheb({10, 10}, false, Metric::chebyshev);
  const GridSpace<2> eucl({10, 10}, false, Metric::euclidean);
  CHECK(cheb.neighbor_positions({5, 5}, 1).size() == 8);
  CHECK(eucl.neighbor_positions({5, 5}, 1).size() == 4);
  CHECK(eucl.neighbor_positions({5, 5}, 1.5).size() == 8);
  CHECK(eucl.neighbor_positions({5, 5}, 2).size() == 12);
  CHECK(cheb.neighbor_positions({0, 0}, 1).size() == 3);
  CHECK(cheb.neighbor_positions({5, 5}, 0).empty());

  const GridSpace<2> torus({10, 10}, true, Metric::chebyshev);
  const auto wrapped = as_set<GridSpace<2>>(torus.neighbor_positions({0, 0}, 1));
  CHECK(wrapped.size() == 8);
  CHECK(wrapped.count({9, 9}) == 1);
  CHECK(wrapped.count({1, 9}) == 1);

  const GridSpace<2> thin({3, 2}, true, Metric::chebyshev);
  CHECK(thin.neighbor_positions({0, 0}, 1).size() == 5);
  CHECK(thin.neighbor_positions({0, 0}, 5).size() == 5);

  const GridSpace<1> line({10}, false, Metric::euclidean);
  CHECK(line.neighbor_positions({0}, 3).size() == 3);
  CHECK(GridSpace<3>({5, 5, 5}, false, Metric::chebyshev).neighbor_positions({2, 2, 2}, 1).size() == 26);
}

TEST_CASE("grid normalization and emptiness") {
  GridSpace<2> torus({4, 3}, true);
  CHECK(torus.normalize({-1, 3}) == std::array<int, 2>{3, 0});
  CHECK(torus.normalize({9, -4}) == std::array<int, 2>{1, 2});
  GridSpace<2> box({4, 3}, false);
  CHECK_THROWS_AS(static_cast<void>(box.normalize({4, 0})), ContractViolation);
  CHECK(box.empty_count() == 12);
  box.register_agent(AgentId{1}, {1, 1});
  box.register_agent(AgentId{2}, {1, 1});
  CHECK(box.empty_count() == 11);
  CHECK_FALSE(box.is_empty({1, 1}));
  CHECK(box.ids_in({1, 1}) == std::vector<AgentId>{AgentId{1}, AgentId{2}});
  CHECK(box.empty_positions().size() == 11);
  box.unregister_agent(AgentId{1}, {1, 1});
  CHECK(box.empty_count() == 11);
  box.update_position(AgentId{2}, {1, 1}, {0, 0});
  CHECK(box.is_empty({1, 1}));
  Rng rng(2);
  for (int i = 0; i < 100; ++i) CHECK(*box.random_empty(rng) != std::array<int, 2>{0, 0});
  CHECK(box.describe().find("periodic=false") != std::string::npos);
}

TEST_CASE("random_empty picks the k-th empty cell uniformly") {
  GridSpace<2> g({4, 4});
  for (int i = 0; i < 12; ++i) g.register_agent(AgentId{i + 1}, g.from_linear(std::size_t(i)));
  Rng rng(9);
  std::array<int, 4> hits{};
  for (int i = 0; i < 40000; ++i) ++hits[std::size_t(g.linear(*g.random_empty(rng)) - 12)];
  for (int h : hits) CHECK(std::abs(h - 10000) < 400);
}

TEST_CASE("continuous normalization and displacement") {
  ContinuousSpace<2> torus(Eigen::Vector2d(10, 10), true);
  CHECK(torus.normalize(Eigen::Vector2d(-1, 12)).isApprox(Eigen::Vector2d(9, 2)));
  CHECK(torus.displacement(Eigen::Vector2d(9, 1), Eigen::Vector2d(1, 9)).isApprox(Eigen::Vector2d(2, -2)));
  CHECK(torus.squared_distance(Eigen::Vector2d(9.5, 0), Eigen::Vector2d(0.5, 0)) == doctest::Approx(1.0));
  CHECK(torus.normalize(Eigen::Vector2d(-1e-18, 0))[0] < 10);
  ContinuousSpace<2> box(Eigen::Vector2d(10, 10), false);
  CHECK_THROWS_AS(static_cast<void>(box.normalize(Eigen::Vector2d(10, 0))), ContractViolation);
  CHECK_THROWS_AS(static_cast<void>(box.normalize(Eigen::Vector2d(std::nan(""), 0))), ContractViolation);
  CHECK(box.squared_distance(Eigen::Vector2d(9.5, 0), Eigen::Vector2d(0.5, 0)) == doctest::Approx(81.0));
}

TEST_CASE("graph topology edits") {
  GraphSpace g(4);
  g.add_undirected_edge(0, 1);
  g.add_edge(1, 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(2, 1));
  CHECK(g.edge_count() == 3);
  CHECK(g.neighbor_positions(0, 2) == std::vector<NodeId>{1, 2});
  CHECK(g.neighbor_positions(2, 3).empty());
  g.register_agent(AgentId{1}, 2);
  CHECK_THROWS_AS(g.remove_node(2), OccupiedNode);
  g.update_position(AgentId{1}, 2, 3);
  g.remove_node(2);
  CHECK_FALSE(g.has_node(2));
  CHECK(g.edge_count() == 2);
  CHECK(g.nodes() == std::vector<NodeId>{0, 1, 3});
  CHECK(g.add_node() == 4);
  CHECK_THROWS_AS(static_cast<void>(g.normalize(2)), ContractViolation);
  CHECK_THROWS_AS(g.add_edge(0, 2), ContractViolation);
  CHECK(g.empty_positions() == std::vector<NodeId>{0, 1, 4});
  Rng rng(4);
  for (int i = 0; i < 50; ++i) CHECK(g.random_position(rng) != 2);
  g.remove_edge(0, 1);
  CHECK_FALSE(g.has_edge(0, 1));
}
