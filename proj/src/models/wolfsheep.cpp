#include "abm/models/wolfsheep.hpp"

namespace abm::wolfsheep {

Config Config::from(const abm::Config& c) {
  require_known_keys(c, {"width", "height", "n_sheep", "n_wolves", "sheep_reproduce", "wolf_reproduce", "sheep_gain",
                         "wolf_gain", "grass_regrowth_time"});
  Config o;
  o.width = static_cast<int>(config_int(c, "width", o.width));
  o.height = static_cast<int>(config_int(c, "height", o.height));
  o.n_sheep = config_int(c, "n_sheep", o.n_sheep);
  o.n_wolves = config_int(c, "n_wolves", o.n_wolves);
  o.sheep_reproduce = config_real(c, "sheep_reproduce", o.sheep_reproduce);
  o.wolf_reproduce = config_real(c, "wolf_reproduce", o.wolf_reproduce);
  o.sheep_gain = config_real(c, "sheep_gain", o.sheep_gain);
  o.wolf_gain = config_real(c, "wolf_gain", o.wolf_gain);
  o.grass_regrowth_time = config_int(c, "grass_regrowth_time", o.grass_regrowth_time);
  if (o.width < 1 || o.height < 1) throw ConfigError("wolfsheep: grid dimensions must be positive");
  if (o.n_sheep < 0 || o.n_wolves < 0) throw ConfigError("wolfsheep: populations must be non-negative");
  for (double p : {o.sheep_reproduce, o.wolf_reproduce})
    if (!(p >= 0 && p <= 1)) throw ConfigError("wolfsheep: reproduction probabilities must lie in [0, 1]");
  if (!(o.sheep_gain > 0 && o.wolf_gain > 0)) throw ConfigError("wolfsheep: energy gains must be positive");
  if (o.grass_regrowth_time < 1) throw ConfigError("wolfsheep: grass_regrowth_time must be at least 1");
  return o;
}

abm::Config Config::to_map() const {
  return {{"width", std::int64_t{width}},   {"height", std::int64_t{height}},
          {"n_sheep", n_sheep},             {"n_wolves", n_wolves},
          {"sheep_reproduce", sheep_reproduce}, {"wolf_reproduce", wolf_reproduce},
          {"sheep_gain", sheep_gain},       {"wolf_gain", wolf_gain},
          {"grass_regrowth_time", grass_regrowth_time}};
}

Schema schema() {
  Schema s;
  s.add_kind({"Sheep", {{"energy", 0.0}}});
  s.add_kind({"Wolf", {{"energy", 0.0}}});
  return s;
}

ModelT make(const Config& config, std::uint64_t seed) {
  Properties props;
  for (auto& [k, v] : config.to_map())
    if (k != "width" && k != "height" && k != "n_sheep" && k != "n_wolves") props[k] = v;
  ModelT model("wolfsheep", Space({config.width, config.height}, true), schema(), std::move(props),
               ModelT::SchedulerType::random(), seed);
  auto& rng = model.rng();
  for (std::int64_t i = 0; i < config.n_sheep; ++i)
    model.add_agent_random(sheep, {static_cast<double>(1 + rng.next_below(static_cast<std::uint64_t>(2 * config.sheep_gain)))});
  for (std::int64_t i = 0; i < config.n_wolves; ++i)
    model.add_agent_random(wolf, {static_cast<double>(1 + rng.next_below(static_cast<std::uint64_t>(2 * config.wolf_gain)))});
  const auto cells = model.space().cell_count();
  auto& grown = model.array("fully_grown");
  auto& countdown = model.array("countdown");
  grown.resize(cells);
  countdown.resize(cells);
  const auto regrowth = static_cast<std::uint64_t>(config.grass_regrowth_time);
  for (std::size_t c = 0; c < cells; ++c) {
    grown[c] = rng.bernoulli(0.5);
    countdown[c] = grown[c] ? config.grass_regrowth_time : static_cast<std::int64_t>(rng.next_below(regrowth));
  }
  return model;
}

void agent_step(AgentT& agent, ModelT& model) {
  const auto options = model.nearby_positions(agent.pos(), 1);
  model.move_agent(agent, options[model.rng().next_below(options.size())]);
  agent[energy] -= 1;
  if (agent.kind() == sheep) {
    const auto cell = model.space().linear(agent.pos());
    auto& grown = model.array("fully_grown");
    if (grown[cell]) {
      grown[cell] = 0;
      model.array("countdown")[cell] = model.get<std::int64_t>("grass_regrowth_time");
      agent[energy] += model.get<double>("sheep_gain");
    }
  } else {
    std::vector<AgentId> prey;
    for (AgentId id : model.space().ids_in(agent.pos()))
      if (model.agent(id).kind() == sheep) prey.push_back(id);
    if (!prey.empty()) {
      model.kill_agent(prey[model.rng().next_below(prey.size())]);
      agent[energy] += model.get<double>("wolf_gain");
    }
  }
  if (agent[energy] <= 0) {
    model.kill_agent(agent.id());
    return;
  }
  const double p = model.get<double>(agent.kind() == sheep ? "sheep_reproduce" : "wolf_reproduce");
  if (model.rng().bernoulli(p)) {
    agent[energy] /= 2;
    model.add_agent(agent.kind(), agent.props, agent.pos());
  }
}

void model_step(ModelT& model) {
  auto& grown = model.array("fully_grown");
  auto& countdown = model.array("countdown");
  const auto regrowth = model.get<std::int64_t>("grass_regrowth_time");
  for (std::size_t c = 0; c < grown.size(); ++c) {
    if (grown[c]) continue;
    if (countdown[c] <= 0) {
      grown[c] = 1;
      countdown[c] = regrowth;
    } else {
      --countdown[c];
    }
  }
}

StepFunctions<ModelT> step_functions() { return {agent_step, model_step}; }

std::size_t count(const ModelT& model, KindId kind) {
  std::size_t n = 0;
  for (const auto& [id, a] : model.agents()) n += a.kind() == kind;
  return n;
}

std::size_t grass(const ModelT& model) {
  std::size_t n = 0;
  for (auto g : model.array("fully_grown")) n += g != 0;
  return n;
}

}  // namespace abm::wolfsheep
