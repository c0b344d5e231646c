#include "abm/models/flocking.hpp"

namespace abm::flocking {

Config Config::from(const abm::Config& c) {
  require_known_keys(c, {"n_birds", "extent", "speed", "visual_distance", "separation", "cohere_factor", "match_factor",
                         "separate_factor"});
  Config o;
  o.n_birds = config_int(c, "n_birds", o.n_birds);
  o.extent = config_real(c, "extent", o.extent);
  o.speed = config_real(c, "speed", o.speed);
  o.visual_distance = config_real(c, "visual_distance", o.visual_distance);
  o.separation = config_real(c, "separation", o.separation);
  o.cohere_factor = config_real(c, "cohere_factor", o.cohere_factor);
  o.match_factor = config_real(c, "match_factor", o.match_factor);
  o.separate_factor = config_real(c, "separate_factor", o.separate_factor);
  if (o.n_birds < 0) throw ConfigError("flocking: n_birds must be non-negative");
  if (!(o.extent > 0 && o.speed > 0 && o.visual_distance > 0 && o.separation > 0))
    throw ConfigError("flocking: extent, speed and distances must be positive");
  if (!(o.separation < o.visual_distance)) throw ConfigError("flocking: separation must be below visual_distance");
  if (o.cohere_factor < 0 || o.match_factor < 0 || o.separate_factor < 0)
    throw ConfigError("flocking: rule weights must be non-negative");
  return o;
}

abm::Config Config::to_map() const {
  return {{"n_birds", n_birds},           {"extent", extent},
          {"speed", speed},               {"visual_distance", visual_distance},
          {"separation", separation},     {"cohere_factor", cohere_factor},
          {"match_factor", match_factor}, {"separate_factor", separate_factor}};
}

Schema schema() {
  Schema s;
  s.add_kind({"Bird", {{"vel_x", 0.0}, {"vel_y", 0.0}}});
  return s;
}

ModelT make(const Config& config, std::uint64_t seed) {
  Properties props;
  for (auto& [k, v] : config.to_map())
    if (k != "n_birds" && k != "extent") props[k] = v;
  ModelT model("flocking", Space(Space::Position(config.extent, config.extent), true), schema(), std::move(props),
               ModelT::SchedulerType::fastest(), seed);
  for (std::int64_t i = 0; i < config.n_birds; ++i) {
    const Space::Position pos = model.space().random_position(model.rng());
    Eigen::Vector2d v;
    do v = {model.rng().uniform(-1, 1), model.rng().uniform(-1, 1)};
    while (v.squaredNorm() == 0);
    v *= config.speed / v.norm();
    model.add_agent(0, {v.x(), v.y()}, pos);
  }
  return model;
}

void agent_step(AgentT& bird, ModelT& model) {
  const auto& space = model.space();
  const double separation = model.get<double>("separation");
  Eigen::Vector2d cohere = Eigen::Vector2d::Zero(), separate = cohere, match = cohere;
  std::size_t n = 0;
  for (AgentId id : model.nearby_ids(bird, model.get<double>("visual_distance"))) {
    const auto& other = model.agent(id);
    const Eigen::Vector2d heading = space.displacement(bird.pos(), other.pos());
    cohere += heading;
    match += Eigen::Vector2d(other[vel_x], other[vel_y]);
    if (heading.squaredNorm() < separation * separation) separate -= heading;
    ++n;
  }
  Eigen::Vector2d vel(bird[vel_x], bird[vel_y]);
  if (n > 0) {
    const double inv = 1.0 / static_cast<double>(n);
    const Eigen::Vector2d next = (vel + cohere * inv * model.get<double>("cohere_factor") +
                                  separate * inv * model.get<double>("separate_factor") +
                                  match * inv * model.get<double>("match_factor")) / 2;
    if (next.squaredNorm() > 0) vel = next;
  }
  vel *= model.get<double>("speed") / vel.norm();
  bird[vel_x] = vel.x();
  bird[vel_y] = vel.y();
  model.move_agent(bird, bird.pos() + vel);
}

StepFunctions<ModelT> step_functions() { return {agent_step, {}}; }

}  // namespace abm::flocking
