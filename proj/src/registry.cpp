#include "abm/registry.hpp"

#include "abm/models/fishery.hpp"
#include "abm/models/flocking.hpp"
#include "abm/models/forestfire.hpp"
#include "abm/models/schelling.hpp"
#include "abm/models/wolfsheep.hpp"
#include "abm/simulation.hpp"

namespace abm {

bool ParamRange::contains(const Value& v) const {
  if (!is_interval()) {
    for (const auto& allowed : values)
      if (!value_less(v, allowed) && !value_less(allowed, v)) return true;
    return false;
  }
  if (!std::holds_alternative<double>(v) && !std::holds_alternative<std::int64_t>(v)) return false;
  const double x = to_double(v);
  return x >= min && x <= max;
}

namespace {

template <class Cell>
HeatGrid heat_from(const GridSpace<2>& space, const std::vector<Cell>& cells) {
  HeatGrid h{space.dims()[0], space.dims()[1], {}};
  h.values.assign(cells.begin(), cells.end());
  return h;
}

std::vector<Value> int_range(std::int64_t lo, std::int64_t hi) {
  std::vector<Value> out;
  for (auto i = lo; i <= hi; ++i) out.emplace_back(i);
  return out;
}

Bindings<schelling::ModelT> schelling_bindings() {
  using namespace schelling;
  Bindings<ModelT> b;
  b.fns = step_functions();
  b.scheduler = ModelT::SchedulerType::random();
  b.agent_functions["x"] = [](const AgentT& a, const ModelT&) -> Value { return std::int64_t{a.pos()[0]}; };
  b.agent_functions["y"] = [](const AgentT& a, const ModelT&) -> Value { return std::int64_t{a.pos()[1]}; };
  b.filters["right"] = [](const AgentT& a, const ModelT& m) { return 2 * a.pos()[0] >= m.space().dims()[0]; };
  b.filters["group1"] = [](const AgentT& a, const ModelT&) { return a[group] == 1; };
  b.filters["group2"] = [](const AgentT& a, const ModelT&) { return a[group] == 2; };
  b.model_functions["happy_fraction"] = [](const ModelT& m) -> Value {
    std::size_t happy = 0;
    for (const auto& [id, a] : m.agents()) happy += a[mood];
    return m.agent_count() == 0 ? 0.0 : static_cast<double>(happy) / static_cast<double>(m.agent_count());
  };
  b.glyph = [](const AgentT& a, const ModelT&) {
    const bool first = a[group] == 1;
    return AgentGlyph{a.id().value, double(a.pos()[0]), double(a.pos()[1]), first ? "#0000ff" : "#ffa500",
                      first ? "circle" : "rect", 10};
  };
  return b;
}

Bindings<flocking::ModelT> flocking_bindings() {
  using namespace flocking;
  Bindings<ModelT> b;
  b.fns = step_functions();
  b.agent_functions["x"] = [](const AgentT& a, const ModelT&) -> Value { return a.pos()[0]; };
  b.agent_functions["y"] = [](const AgentT& a, const ModelT&) -> Value { return a.pos()[1]; };
  b.model_functions["order"] = [](const ModelT& m) -> Value {
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (const auto& [id, a] : m.agents()) sum += Eigen::Vector2d(a[vel_x], a[vel_y]).normalized();
    return m.agent_count() == 0 ? 0.0 : sum.norm() / static_cast<double>(m.agent_count());
  };
  b.glyph = [](const AgentT& a, const ModelT&) {
    return AgentGlyph{a.id().value, a.pos()[0], a.pos()[1], "#000000", "triangle", 6};
  };
  return b;
}

Bindings<wolfsheep::ModelT> wolfsheep_bindings() {
  using namespace wolfsheep;
  Bindings<ModelT> b;
  b.fns = step_functions();
  b.scheduler = ModelT::SchedulerType::random();
  b.filters["sheep"] = [](const AgentT& a, const ModelT&) { return a.kind() == sheep; };
  b.filters["wolf"] = [](const AgentT& a, const ModelT&) { return a.kind() == wolf; };
  b.model_functions["sheep"] = [](const ModelT& m) -> Value { return static_cast<std::int64_t>(count(m, sheep)); };
  b.model_functions["wolves"] = [](const ModelT& m) -> Value { return static_cast<std::int64_t>(count(m, wolf)); };
  b.model_functions["grass"] = [](const ModelT& m) -> Value { return static_cast<std::int64_t>(grass(m)); };
  b.glyph = [](const AgentT& a, const ModelT&) {
    const bool s = a.kind() == sheep;
    return AgentGlyph{a.id().value, double(a.pos()[0]), double(a.pos()[1]), s ? "#f5f5f5" : "#000000",
                      s ? "circle" : "triangle", s ? 8.0 : 10.0};
  };
  b.heat = [](const ModelT& m) -> std::optional<HeatGrid> { return heat_from(m.space(), m.array("fully_grown")); };
  return b;
}

Bindings<forestfire::ModelT> forestfire_bindings() {
  using namespace forestfire;
  Bindings<ModelT> b;
  b.fns = step_functions();
  b.model_functions["burnt_fraction"] = [](const ModelT& m) -> Value { return burnt_fraction(m); };
  b.heat = [](const ModelT& m) -> std::optional<HeatGrid> { return heat_from(m.space(), m.array("trees")); };
  b.finished = [](const ModelT& m) { return finished(m); };
  return b;
}

Bindings<fishery::ModelT> fishery_bindings() {
  using namespace fishery;
  Bindings<ModelT> b;
  b.fns = step_functions();
  b.glyph = [](const AgentT& a, const ModelT&) {
    return AgentGlyph{a.id().value, double(a.id().value), a[competence], a[fishing] ? "#2e8b57" : "#a9a9a9", "circle", 8};
  };
  return b;
}

template <class Cfg, class MakeFn, class BindFn>
ModelInfo entry(std::string name, std::string summary, std::string source, MakeFn make, BindFn bind) {
  using ModelT = decltype(make(Cfg{}, 0));
  using Space = typename ModelT::SpaceType;
  ModelInfo info;
  info.name = std::move(name);
  info.summary = std::move(summary);
  info.defaults = Cfg{}.to_map();
  info.source_file = std::move(source);
  info.create = [make, bind](const Config& c, std::uint64_t seed) -> std::unique_ptr<Simulation> {
    auto model = make(Cfg::from(c), seed);
    auto b = bind();
    model.set_scheduler(b.scheduler);
    return std::make_unique<BoundSimulation<ModelT>>(std::move(model), std::move(b));
  };
  info.restore = [bind](std::string_view text) -> std::unique_ptr<Simulation> {
    auto b = bind();
    auto model = persist::load_checkpoint<Space>(text, b.scheduler);
    return std::make_unique<BoundSimulation<ModelT>>(std::move(model), std::move(b));
  };
  return info;
}

std::vector<ModelInfo> build_catalog() {
  std::vector<ModelInfo> out;

  auto s = entry<schelling::Config>("schelling", "Schelling segregation on a 2-D grid", "src/models/schelling.cpp",
                                    schelling::make, schelling_bindings);
  s.params = {{"min_to_be_happy", int_range(0, 8)}};
  s.series = {{"happy", "sum_mood"}, {"avg. x", "mean_x"}};
  s.default_adata = {"sum_mood", "maximum_x"};
  out.push_back(std::move(s));

  auto f = entry<flocking::Config>("flocking", "Boids flocking in a periodic continuous square",
                                   "src/models/flocking.cpp", flocking::make, flocking_bindings);
  f.params = {{"cohere_factor", {}, 0, 1, 0.01},
              {"match_factor", {}, 0, 1, 0.01},
              {"separate_factor", {}, 0, 1, 0.01},
              {"speed", {}, 0.1, 5, 0.1}};
  f.series = {{"order", "order"}};
  f.default_mdata = {"order"};
  out.push_back(std::move(f));

  auto w = entry<wolfsheep::Config>("wolfsheep", "Wolves, sheep and regrowing grass on a periodic grid",
                                    "src/models/wolfsheep.cpp", wolfsheep::make, wolfsheep_bindings);
  w.params = {{"sheep_reproduce", {}, 0, 1, 0.01},
              {"wolf_reproduce", {}, 0, 1, 0.01},
              {"sheep_gain", {}, 1, 50, 1},
              {"wolf_gain", {}, 1, 50, 1},
              {"grass_regrowth_time", int_range(1, 100)}};
  w.series = {{"sheep", "sheep"}, {"wolves", "wolves"}, {"grass", "grass"}};
  w.default_mdata = {"sheep", "wolves", "grass"};
  out.push_back(std::move(w));

  auto ff = entry<forestfire::Config>("forestfire", "Forest fire spreading from the left edge",
                                      "src/models/forestfire.cpp", forestfire::make, forestfire_bindings);
  ff.params = {{"density", {}, 0, 1, 0.01}};
  ff.series = {{"burning", "burning"}, {"burnt", "burnt"}};
  ff.default_mdata = {"burning", "burnt", "burnt_fraction"};
  out.push_back(std::move(ff));

  auto fi = entry<fishery::Config>("fishery", "Fishers harvesting a logistic fish stock", "src/models/fishery.cpp",
                                   fishery::make, fishery_bindings);
  fi.params = {{"threshold", {}, 0, 120, 1}};
  fi.series = {{"stock", "stock"}, {"harvest", "harvest"}};
  fi.default_mdata = {"stock", "harvest"};
  out.push_back(std::move(fi));
  return out;
}

}  // namespace

const std::vector<ModelInfo>& catalog() {
  static const std::vector<ModelInfo> models = build_catalog();
  return models;
}

const ModelInfo* find_model(std::string_view name) {
  for (const auto& m : catalog())
    if (m.name == name) return &m;
  return nullptr;
}

std::string model_names() {
  std::string out;
  for (const auto& m : catalog()) out += (out.empty() ? "" : ", ") + m.name;
  return out;
}

std::unique_ptr<Simulation> restore_simulation(std::string_view checkpoint) {
  const auto root = persist::parse(checkpoint);
  persist::check_version(root);
  const auto& name = persist::Reader(root, "")["model"].string();
  const auto* info = find_model(name);
  if (!info) throw CorruptCheckpoint("/model: unknown model '" + name + "' (available: " + model_names() + ")");
  return info->restore(checkpoint);
}

Config merged_config(const ModelInfo& info, const Config& overrides) {
  std::vector<std::string> known;
  for (const auto& [k, v] : info.defaults) known.push_back(k);
  require_known_keys(overrides, known);
  Config out = info.defaults;
  for (const auto& [k, v] : overrides) out[k] = v;
  return out;
}

}  // namespace abm
