#include "abm/models/schelling.hpp"

#include <cmath>

namespace abm::schelling {

Config Config::from(const abm::Config& c) {
  require_known_keys(c, {"width", "height", "density", "min_to_be_happy"});
  Config out;
  out.width = static_cast<int>(config_int(c, "width", out.width));
  out.height = static_cast<int>(config_int(c, "height", out.height));
  out.density = config_real(c, "density", out.density);
  out.min_to_be_happy = config_int(c, "min_to_be_happy", out.min_to_be_happy);
  if (out.width < 1 || out.height < 1) throw ConfigError("schelling: grid dimensions must be positive");
  if (!(out.density > 0 && out.density <= 1)) throw ConfigError("schelling: density must lie in (0, 1]");
  if (std::lround(out.density * out.width * out.height) < 1) throw ConfigError("schelling: density leaves no agents");
  if (out.min_to_be_happy < 0 || out.min_to_be_happy > 8) throw ConfigError("schelling: min_to_be_happy must lie in 0..8");
  return out;
}

abm::Config Config::to_map() const {
  return {{"width", std::int64_t{width}}, {"height", std::int64_t{height}}, {"density", density},
          {"min_to_be_happy", min_to_be_happy}};
}

Schema schema() {
  Schema s;
  s.add_kind({"SchellingAgent", {{"mood", false}, {"group", std::int64_t{0}}}});
  return s;
}

ModelT make(const Config& config, std::uint64_t seed) {
  Properties props{{"min_to_be_happy", config.min_to_be_happy}};
  ModelT model("schelling", Space({config.width, config.height}), schema(), std::move(props), ModelT::SchedulerType::random(), seed);
  const auto n = std::lround(config.density * config.width * config.height);
  for (long i = 0; i < n; ++i) model.add_agent_single(0, {false, std::int64_t{1 + i % 2}});
  return model;
}

void agent_step(AgentT& agent, ModelT& model) {
  if (agent[mood]) return;
  std::int64_t same = 0;
  for (AgentId id : model.nearby_ids(agent, 1)) same += model.agent(id)[group] == agent[group];
  if (same >= model.get<std::int64_t>("min_to_be_happy")) agent[mood] = true;
  else model.move_agent_single(agent);
}

StepFunctions<ModelT> step_functions() { return {agent_step, {}}; }

}  // namespace abm::schelling
