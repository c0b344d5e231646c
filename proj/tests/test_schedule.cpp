#include <doctest.h>

#include <algorithm>

#include "abm/model.hpp"
#include "abm/space/nospace.hpp"

using namespace abm;

namespace {

using M = Model<NoSpace>;

Schema schema() {
  return Schema{{"Cat", {{"age", std::int64_t{0}}}}, {"Dog", {{"age", std::int64_t{0}}, {"size", 1.0}}},
                {"Fish", {{"size", 1.0}}}};
}

/// Kinds cycle Cat, Dog, Cat, Fish, Dog, ...; ages repeat 3, 1, 2, 1, 3, ...
M zoo(M::SchedulerType s, std::uint64_t seed = 5) {
  M m("zoo", NoSpace{}, schema(), {}, std::move(s), seed);
  const std::vector<KindId> kinds{0, 1, 0, 2, 1, 2, 0, 1};
  const std::vector<std::int64_t> ages{3, 1, 2, 1, 3, 2, 1, 2};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == 2) m.add_agent(kinds[i], m.schema().make(2, {{"size", double(i)}}), {});
    else m.add_agent(kinds[i], m.schema().make(kinds[i], {{"age", ages[i]}}), {});
  }
  return m;
}

std::vector<std::int64_t> values(const std::vector<AgentId>& ids) {
  std::vector<std::int64_t> out;
  for (auto id : ids) out.push_back(id.value);
  return out;
}

}  // namespace

TEST_CASE("fastest activates in ascending id order") {
  auto m = zoo(M::SchedulerType::fastest());
  CHECK(values(m.scheduler()(m)) == std::vector<std::int64_t>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(m.scheduler().name() == "fastest");
}

TEST_CASE("random is a Fisher-Yates shuffle of the ascending ids with the model rng") {
  auto m = zoo(M::SchedulerType::random(), 77);
  for (int step = 0; step < 5; ++step) {
    Rng oracle = m.rng();
    auto expected = m.ids();
    for (std::size_t i = expected.size() - 1; i > 0; --i) std::swap(expected[i], expected[oracle.next_below(i + 1)]);
    const auto got = m.scheduler()(m);
    CHECK(got == expected);
    CHECK(m.rng().state().s == oracle.state().s);
  }
}

TEST_CASE("random order frequencies are uniform") {
  auto m = zoo(M::SchedulerType::random(), 3);
  std::array<int, 8> first{};
  for (int i = 0; i < 16000; ++i) ++first[std::size_t(m.scheduler()(m).front().value - 1)];
  for (int c : first) CHECK(std::abs(c - 2000) < 200);
}

TEST_CASE("by_property sorts stably, ties by ascending id") {
  auto m = zoo(M::SchedulerType::by_property("age"));
  CHECK_THROWS_AS(m.scheduler()(m), ContractViolation);
  m.kill_by([](const auto& a) { return a.kind() == 2; });
  CHECK(values(m.scheduler()(m)) == std::vector<std::int64_t>{2, 7, 3, 8, 1, 5});
  m.set_scheduler(M::SchedulerType::by_property("age", false));
  CHECK(values(m.scheduler()(m)) == std::vector<std::int64_t>{1, 5, 3, 8, 2, 7});
}

TEST_CASE("filtered drops agents from the base order") {
  auto m = zoo(M::SchedulerType::filtered([](const auto& a, const auto&) { return a.kind() != 2; },
                                          M::SchedulerType::fastest()));
  CHECK(values(m.scheduler()(m)) == std::vector<std::int64_t>{1, 2, 3, 5, 7, 8});
}

TEST_CASE("by_type puts listed kinds first") {
  auto m = zoo(M::SchedulerType::by_type({"Fish", "Cat"}, false));
  CHECK(values(m.scheduler()(m)) == std::vector<std::int64_t>{4, 6, 1, 3, 7, 2, 5, 8});
  m.set_scheduler(M::SchedulerType::by_type({"Dog"}, true));
  for (int i = 0; i < 20; ++i) {
    const auto order = values(m.scheduler()(m));
    std::vector<std::int64_t> dogs(order.begin(), order.begin() + 3);
    std::vector<std::int64_t> cats(order.begin() + 3, order.begin() + 6);
    std::sort(dogs.begin(), dogs.end());
    std::sort(cats.begin(), cats.end());
    CHECK(dogs == std::vector<std::int64_t>{2, 5, 8});
    CHECK(cats == std::vector<std::int64_t>{1, 3, 7});
  }
  m.set_scheduler(M::SchedulerType::by_type({"Horse"}, false));
  CHECK_THROWS(m.scheduler()(m));
}

TEST_CASE("custom orders") {
  auto m = zoo(M::SchedulerType::custom("reverse", [](M& model) {
    auto ids = model.ids();
    std::reverse(ids.begin(), ids.end());
    return ids;
  }));
  CHECK(values(m.scheduler()(m)) == std::vector<std::int64_t>{8, 7, 6, 5, 4, 3, 2, 1});
  CHECK(m.scheduler().name().find("reverse") != std::string::npos);
}

TEST_CASE("the order is computed afresh each step") {
  auto m = zoo(M::SchedulerType::by_property("size"));
  m.kill_by([](const auto& a) { return a.kind() != 2 && a.kind() != 1; });
  std::vector<std::int64_t> seen;
  StepFunctions<M> fns{[&](M::AgentType& a, M& model) {
    seen.push_back(a.id().value);
    auto& size = std::get<double>(a.props[*model.schema().field_index(a.kind(), "size")]);
    size = -size - double(a.id().value);
  }, {}};
  step(m, fns);
  CHECK(seen == std::vector<std::int64_t>{2, 5, 8, 4, 6});
  seen.clear();
  step(m, fns);
  CHECK(seen == std::vector<std::int64_t>{6, 8, 4, 5, 2});
}
