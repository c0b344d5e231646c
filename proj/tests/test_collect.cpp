#include <doctest.h>

#include <cmath>
#include <map>

#include "abm/collect.hpp"
#include "abm/space/grid.hpp"

using namespace abm;

namespace {

using M = Model<GridSpace<2>>;
using AC = AgentCollector<M>;
using MC = ModelCollector<M>;

const Field<std::int64_t> wealth{0};
const Field<bool> rich{1};

M economy(std::uint64_t seed) {
  M m("economy", GridSpace<2>({8, 8}), Schema{{"Person", {{"wealth", std::int64_t{1}}, {"rich", false}}}}, {{"tax", 0.1}},
      M::SchedulerType::random(), seed);
  for (int i = 0; i < 30; ++i) m.add_agent_random(0, m.schema().make(0));
  return m;
}

/// Each agent gives one unit to a random other agent and walks one cell.
StepFunctions<M> exchange() {
  StepFunctions<M> fns;
  fns.agent_step = [](M::AgentType& a, M& m) {
    if (a[wealth] > 0) {
      const auto ids = m.ids();
      auto& other = m.agent(ids[m.rng().next_below(ids.size())]);
      --a[wealth];
      ++other[wealth];
    }
    a[rich] = a[wealth] >= 3;
    const auto around = m.nearby_positions(a.pos(), 1);
    m.move_agent(a, around[m.rng().next_below(around.size())]);
  };
  fns.model_step = [](M& m) { m.get<double>("tax") += 0.01; };
  return fns;
}

AC x_of() {
  return AC::function("x", [](const M::AgentType& a, const M&) -> Value { return std::int64_t{a.pos()[0]}; });
}

bool left(const M::AgentType& a, const M&) { return a.pos()[0] < 4; }

}  // namespace

TEST_CASE("column names follow <aggregator>_<source>[_<filter>]") {
  CHECK(AC::property("wealth").column_name() == "wealth");
  CHECK(AC::property("wealth").aggregated(aggregate::sum()).column_name() == "sum_wealth");
  CHECK(x_of().aggregated(aggregate::maximum()).column_name() == "maximum_x");
  CHECK(AC::property("wealth").aggregated(aggregate::mean()).where("left", left).column_name() == "mean_wealth_left");
  for (const char* name : {"sum", "count", "mean", "minimum", "maximum", "std"})
    CHECK(aggregate::by_name(name)->name == name);
  CHECK_FALSE(aggregate::by_name("median"));
}

TEST_CASE("aggregators") {
  const std::vector<Value> ints{std::int64_t{3}, std::int64_t{1}, std::int64_t{2}};
  CHECK(aggregate::sum().fn(ints) == Value{std::int64_t{6}});
  CHECK(aggregate::count().fn(ints) == Value{std::int64_t{3}});
  CHECK(aggregate::mean().fn(ints) == Value{2.0});
  CHECK(aggregate::minimum().fn(ints) == Value{std::int64_t{1}});
  CHECK(aggregate::maximum().fn(ints) == Value{std::int64_t{3}});
  CHECK(std::get<double>(aggregate::stddev().fn(ints)) == doctest::Approx(1.0));
  CHECK(aggregate::sum().fn({true, false, true}) == Value{std::int64_t{2}});
  CHECK(aggregate::sum().fn({1.5, std::int64_t{2}}) == Value{3.5});
  CHECK(aggregate::sum().fn({}) == Value{std::int64_t{0}});
  CHECK(aggregate::count().fn({}) == Value{std::int64_t{0}});
  CHECK(is_missing(aggregate::mean().fn({})));
  CHECK(is_missing(aggregate::maximum().fn({})));
  CHECK(is_missing(aggregate::stddev().fn({1.0})));
}

TEST_CASE("run records the initial state and every `when` steps") {
  auto m = economy(1);
  const auto r = run(m, exchange(), 7, {AC::property("wealth").aggregated(aggregate::sum())}, {MC::property("tax")}, 3);
  CHECK(r.agents.names() == std::vector<std::string>{"step", "sum_wealth"});
  CHECK(r.agents.column("step") == std::vector<Value>{std::int64_t{0}, std::int64_t{3}, std::int64_t{6}});
  for (const auto& v : r.agents.column("sum_wealth")) CHECK(v == Value{std::int64_t{30}});
  CHECK(std::get<double>(r.model.column("tax")[0]) == doctest::Approx(0.1));
  CHECK(std::get<double>(r.model.column("tax")[2]) == doctest::Approx(0.16));
  CHECK(m.step_count() == 7);
}

TEST_CASE("aggregated collection equals aggregating the raw table") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto raw_model = economy(seed);
    auto agg_model = economy(seed);
    const auto raw = run(raw_model, exchange(), 20, {AC::property("wealth"), AC::property("rich"), x_of()});
    const auto agg = run(agg_model, exchange(), 20,
                         {AC::property("wealth").aggregated(aggregate::sum()),
                          AC::property("wealth").aggregated(aggregate::maximum()),
                          AC::property("rich").aggregated(aggregate::sum()),
                          x_of().aggregated(aggregate::mean()).where("left", left),
                          AC::property("wealth").aggregated(aggregate::count()).where("left", left)});
    REQUIRE(raw.agents.names() == std::vector<std::string>{"step", "id", "wealth", "rich", "x"});
    CHECK(raw_model.rng().state().s == agg_model.rng().state().s);

    struct Acc {
      std::int64_t sum = 0, max = 0, rich = 0, left_n = 0, left_x = 0;
    };
    std::map<std::int64_t, Acc> by_step;
    for (std::size_t i = 0; i < raw.agents.rows(); ++i) {
      const auto row = raw.agents.row(i);
      auto& acc = by_step[std::get<std::int64_t>(row[0])];
      const auto w = std::get<std::int64_t>(row[2]);
      acc.sum += w;
      acc.max = std::max(acc.max, w);
      acc.rich += std::get<bool>(row[3]);
      const auto x = std::get<std::int64_t>(row[4]);
      if (x < 4) {
        ++acc.left_n;
        acc.left_x += x;
      }
    }
    REQUIRE(agg.agents.rows() == 21);
    for (std::size_t i = 0; i < agg.agents.rows(); ++i) {
      const auto row = agg.agents.row(i);
      const auto& acc = by_step.at(std::get<std::int64_t>(row[0]));
      CHECK(row[1] == Value{acc.sum});
      CHECK(row[2] == Value{acc.max});
      CHECK(row[3] == Value{acc.rich});
      if (acc.left_n == 0) CHECK(is_missing(row[4]));
      else CHECK(std::get<double>(row[4]) == doctest::Approx(double(acc.left_x) / double(acc.left_n)));
      CHECK(row[5] == Value{acc.left_n});
    }
  }
}

TEST_CASE("collector resolution fails before stepping") {
  auto m = economy(2);
  CHECK_THROWS_AS(run(m, exchange(), 3, {AC::property("height")}), CollectorResolution);
  CHECK_THROWS_AS(run(m, exchange(), 3, {}, {MC::property("interest")}), CollectorResolution);
  CHECK_THROWS_AS(run(m, exchange(), 3, {AC::property("wealth"), AC::property("wealth").aggregated(aggregate::sum())}),
                  CollectorResolution);
  CHECK_THROWS_AS(run(m, exchange(), 3, {AC::property("wealth").where("left", left)}), CollectorResolution);
  CHECK_THROWS_AS(run(m, exchange(), 3, {AC::property("wealth")}, {}, 0), ContractViolation);
  CHECK(m.step_count() == 0);
}

TEST_CASE("fields missing on some kinds leave empty cells") {
  M m("mixed", GridSpace<2>({3, 3}), Schema{{"A", {{"w", std::int64_t{2}}}}, {"B", {{"v", 1.0}}}});
  m.add_agent(0, m.schema().make(0), {0, 0});
  m.add_agent(1, m.schema().make(1), {1, 1});
  const auto raw = run(m, {}, std::size_t{0}, {AgentCollector<M>::property("w")});
  CHECK(raw.agents.column("w") == std::vector<Value>{std::int64_t{2}, Missing{}});
  const auto agg = run(m, {}, std::size_t{0}, {AgentCollector<M>::property("w").aggregated(aggregate::count())});
  CHECK(agg.agents.column("count_w") == std::vector<Value>{std::int64_t{1}});
}

TEST_CASE("run until a condition") {
  auto m = economy(3);
  const auto r = run(m, exchange(), Until<M>{[](const M& model, std::size_t s) { return s >= 4 || model.get<double>("tax") > 0.125; }},
                     {}, {MC::function("n", [](const M& model) -> Value { return std::int64_t(model.agent_count()); })});
  CHECK(r.model.rows() == 4);
  CHECK(m.step_count() == 3);
}
