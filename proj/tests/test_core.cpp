#include <doctest.h>

#include <map>
#include <set>

#include "abm/collect.hpp"
#include "abm/model.hpp"
#include "abm/space/grid.hpp"
#include "abm/space/nospace.hpp"

using namespace abm;

namespace {

using Grid = GridSpace<2>;
using GridModel = Model<Grid>;

const Field<std::int64_t> tag{0};
const Field<double> weight{1};

Schema schema() { return Schema{{"Walker", {{"tag", std::int64_t{0}}, {"weight", 1.0}}}}; }

GridModel grid_model(std::uint64_t seed = 1, Grid space = Grid({6, 5})) {
  return GridModel("walkers", std::move(space), schema(), {}, GridModel::SchedulerType::fastest(), seed);
}

/// Every alive agent sits in exactly the cell of its position, and cells hold nothing else.
void check_index(const GridModel& m) {
  std::size_t indexed = 0;
  for (int x = 0; x < m.space().dims()[0]; ++x)
    for (int y = 0; y < m.space().dims()[1]; ++y) {
      const auto& ids = m.space().ids_in({x, y});
      indexed += ids.size();
      for (AgentId id : ids) {
        REQUIRE(m.alive(id));
        REQUIRE(m.agent(id).pos() == Grid::Position{x, y});
      }
    }
  REQUIRE(indexed == m.agent_count());
}

}  // namespace

TEST_CASE("random add/move/kill sequences keep the registry and space index in bijection") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto m = grid_model(seed);
    Rng ops(seed * 977);
    std::int64_t last_id = 0;
    for (int i = 0; i < 400; ++i) {
      const auto op = ops.next_below(5);
      if (op <= 1 || m.agent_count() == 0) {
        auto& a = m.add_agent_random(0, schema().make(0));
        REQUIRE(a.id().value > last_id);
        last_id = a.id().value;
      } else if (op == 2) {
        const auto ids = m.ids();
        auto& a = m.agent(ids[ops.next_below(ids.size())]);
        m.move_agent(a, m.space().random_position(ops));
      } else if (op == 3) {
        const auto ids = m.ids();
        m.kill_agent(ids[ops.next_below(ids.size())]);
      } else if (m.space().empty_count() > 0) {
        auto& a = m.add_agent_single(0, schema().make(0));
        REQUIRE(m.space().ids_in(a.pos()).size() == 1);
        last_id = a.id().value;
      }
      check_index(m);
    }
  }
}

TEST_CASE("ids increase and are never reused") {
  auto m = grid_model();
  std::set<std::int64_t> seen;
  for (int i = 0; i < 50; ++i) {
    const auto id = m.add_agent(0, schema().make(0), {i % 6, i % 5}).id();
    CHECK(seen.insert(id.value).second);
    if (i % 3 == 0) m.kill_agent(id);
  }
  CHECK(*seen.begin() == 1);
  CHECK(*seen.rbegin() == 50);
  m.kill_all();
  CHECK(m.add_agent(0, schema().make(0), {0, 0}).id().value == 51);
}

TEST_CASE("invalid operations are rejected") {
  auto m = grid_model();
  CHECK_THROWS_AS(m.add_agent(0, schema().make(0), {6, 0}), ContractViolation);
  CHECK_THROWS_AS(m.add_agent(0, {Value{std::int64_t{1}}}, {0, 0}), ContractViolation);
  CHECK_THROWS_AS(m.add_agent(0, {Value{1.0}, Value{1.0}}, {0, 0}), ContractViolation);
  CHECK_THROWS_AS(m.kill_agent(AgentId{99}), NotFound);
  CHECK_THROWS_AS(m.nearby_ids(GridModel::Position{0, 0}, -1), ContractViolation);
  auto& a = m.add_agent(0, schema().make(0), {1, 1});
  const auto id = a.id();
  m.kill_agent(id);
  CHECK_FALSE(m.alive(id));
  CHECK_THROWS_AS(m.agent(id), NotFound);
}

TEST_CASE("filling a space and adding to a full one") {
  auto m = grid_model(3, Grid({3, 3}));
  CHECK(m.fill_space(0, [](GridModel&, const Grid::Position& p) { return schema().make(0, {{"tag", std::int64_t(p[0] + 10 * p[1])}}); }) == 9);
  check_index(m);
  for (const auto& [id, a] : m.agents()) CHECK(a[tag] == a.pos()[0] + 10 * a.pos()[1]);
  CHECK_THROWS_AS(m.add_agent_single(0, schema().make(0)), NoEmptyPosition);
  CHECK_FALSE(m.move_agent_single(m.agent(AgentId{1})));
  CHECK(m.agent(AgentId{1}).pos() == Grid::Position{0, 0});
}

TEST_CASE("an agent killed mid-step is not activated afterwards") {
  auto m = grid_model();
  for (int i = 0; i < 5; ++i) m.add_agent(0, schema().make(0), {i, 0});
  std::vector<std::int64_t> activated;
  StepFunctions<GridModel> fns;
  fns.agent_step = [&](GridModel::AgentType& a, GridModel& model) {
    activated.push_back(a.id().value);
    if (a.id().value == 2) {
      model.kill_agent(AgentId{4});
      model.kill_agent(AgentId{2});
      model.add_agent(0, schema().make(0), {0, 4});
    }
  };
  step(m, fns);
  CHECK(activated == std::vector<std::int64_t>{1, 2, 3, 5});
  CHECK(m.step_count() == 1);
  activated.clear();
  step(m, fns);
  CHECK(activated == std::vector<std::int64_t>{1, 3, 5, 6});
}

TEST_CASE("model step runs after the agents unless requested first") {
  auto m = grid_model();
  m.add_agent(0, schema().make(0), {0, 0});
  std::string trace;
  StepFunctions<GridModel> fns{[&](auto&, auto&) { trace += 'a'; }, [&](auto&) { trace += 'm'; }};
  step(m, fns, 2);
  CHECK(trace == "amam");
  trace.clear();
  m.set_model_step_first(true);
  step(m, fns);
  CHECK(trace == "ma");
  const auto taken = step(m, fns, Until<GridModel>{[](const GridModel& model, std::size_t) { return model.step_count() >= 7; }});
  CHECK(taken == 4);
}

TEST_CASE("sample_agents draws with replacement proportionally to weight") {
  auto m = grid_model(11);
  const std::vector<double> w{1, 2, 3, 4, 0};
  for (std::size_t i = 0; i < w.size(); ++i)
    m.add_agent(0, schema().make(0, {{"tag", std::int64_t(i)}, {"weight", w[i]}}), {int(i), 0});
  const std::size_t n = 200000;
  m.sample_agents(n, [](const GridModel::AgentType& a) { return a[weight]; });
  REQUIRE(m.agent_count() == n);
  std::map<std::int64_t, std::size_t> counts;
  for (const auto& [id, a] : m.agents()) {
    ++counts[a[tag]];
    CHECK(a.pos()[0] == a[tag]);
  }
  CHECK(counts.count(4) == 0);
  double chi2 = 0;
  for (std::int64_t k = 0; k < 4; ++k) {
    const double expected = double(n) * w[std::size_t(k)] / 10.0;
    chi2 += (double(counts[k]) - expected) * (double(counts[k]) - expected) / expected;
  }
  // df = 3; 16.27 is the 0.999 quantile.
  CHECK(chi2 < 16.27);
  check_index(m);
  CHECK(m.ids().front().value == 6);
}

TEST_CASE("sample_agents rejects degenerate weights") {
  auto m = grid_model();
  m.add_agent(0, schema().make(0, {{"weight", 0.0}}), {0, 0});
  CHECK_THROWS_AS(m.sample_agents(3, [](const auto& a) { return a[weight]; }), DegenerateWeights);
  CHECK_THROWS_AS(m.sample_agents(3, [](const auto&) { return -1.0; }), ContractViolation);
  CHECK(m.agent_count() == 1);
}

TEST_CASE("kill_by removes matching agents") {
  auto m = grid_model();
  for (int i = 0; i < 10; ++i) m.add_agent(0, schema().make(0, {{"tag", std::int64_t(i)}}), {i % 6, 0});
  CHECK(m.kill_by([](const auto& a) { return a[tag] % 2 == 0; }) == 5);
  for (const auto& [id, a] : m.agents()) CHECK(a[tag] % 2 == 1);
  check_index(m);
}

TEST_CASE("schema field handles are typed") {
  const Schema s = schema();
  CHECK(s.field<std::int64_t>(0, "tag").index == 0);
  CHECK_THROWS(s.field<double>(0, "tag"));
  CHECK_THROWS(s.field<double>(0, "nope"));
  CHECK(s.kind_id("Walker") == 0);
  CHECK_THROWS(s.make(0, {{"weight", std::int64_t{1}}}));
}

TEST_CASE("properties and arrays") {
  auto m = grid_model();
  m.set_property("rate", 0.5);
  CHECK(m.get<double>("rate") == 0.5);
  m.get<double>("rate") = 0.75;
  CHECK(m.property("rate") == Value{0.75});
  CHECK_THROWS_AS(m.get<std::int64_t>("rate"), ContractViolation);
  CHECK_THROWS_AS(m.property("none"), NotFound);
  m.array("cells").assign(4, 1);
  CHECK(std::as_const(m).array("cells").size() == 4);
}

TEST_CASE("describe summarizes the model") {
  auto m = grid_model();
  m.set_property("min_to_be_happy", std::int64_t{3});
  m.add_agent(0, schema().make(0), {0, 0});
  const auto text = m.describe();
  CHECK(text.find("AgentBasedModel with 1 agents of kind Walker") == 0);
  CHECK(text.find("scheduler: fastest") != std::string::npos);
  CHECK(text.find("min_to_be_happy => 3") != std::string::npos);
}

TEST_CASE("models without space") {
  Model<NoSpace> m("bag", NoSpace{}, schema());
  for (int i = 0; i < 4; ++i) m.add_agent_random(0, schema().make(0));
  CHECK(m.nearby_ids(m.agent(AgentId{2}), 0).size() == 3);
  m.kill_agent(AgentId{3});
  CHECK(m.nearby_ids(NoSpace::Position{}, 1).size() == 3);
}
